//! Finite independent families of subsets of the naturals.
//!
//! Set `i` of the size-`k` family contains `m` iff bit `i` of `m mod 2^k` is set.
//! For any finite choice of sets and complements, the intersection is a union
//! of residue classes mod `2^k`, hence infinite: the family is independent.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported family size.
pub const MAX_FAMILY_SIZE: u32 = 20;

/// The ground set the index sets live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Ground {
    /// `{1, 2, 3, ...}`
    Naturals,
    /// `{0, 1, 2, ...}`
    NaturalsWithZero,
}

impl Ground {
    fn admits(self, m: u64) -> bool {
        m > 0 || self == Ground::NaturalsWithZero
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
enum Rule {
    Bit { family_size: u32, member_bit: u32 },
    All,
}

/// An infinite subset of the naturals given by a periodic bit rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IndexSet {
    rule: Rule,
    ground: Ground,
}

impl IndexSet {
    pub fn new(family_size: u32, member_bit: u32, ground: Ground) -> Result<Self> {
        if !(1..=MAX_FAMILY_SIZE).contains(&family_size) {
            return Err(Error::domain(format!(
                "family size {family_size} outside 1..={MAX_FAMILY_SIZE}"
            )));
        }
        if member_bit >= family_size {
            return Err(Error::domain(format!(
                "member bit {member_bit} not below family size {family_size}"
            )));
        }
        Ok(IndexSet {
            rule: Rule::Bit {
                family_size,
                member_bit,
            },
            ground,
        })
    }

    /// The whole ground set.
    pub fn all(ground: Ground) -> Self {
        IndexSet {
            rule: Rule::All,
            ground,
        }
    }

    pub fn ground(&self) -> Ground {
        self.ground
    }

    /// `(family_size, member_bit)` for bit-rule sets.
    pub fn bit_rule(&self) -> Option<(u32, u32)> {
        match self.rule {
            Rule::Bit {
                family_size,
                member_bit,
            } => Some((family_size, member_bit)),
            Rule::All => None,
        }
    }

    pub fn period(&self) -> u64 {
        match self.rule {
            Rule::Bit { family_size, .. } => 1 << family_size,
            Rule::All => 1,
        }
    }

    fn rule_holds(&self, m: u64) -> bool {
        match self.rule {
            Rule::Bit {
                family_size,
                member_bit,
            } => ((m % (1 << family_size)) >> member_bit) & 1 == 1,
            Rule::All => true,
        }
    }

    pub fn contains(&self, m: u64) -> bool {
        self.ground.admits(m) && self.rule_holds(m)
    }

    /// Members in increasing order; never exhausts.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0u64..).filter(move |&m| self.contains(m))
    }
}

/// The `k` sets of the canonical family of size `k`.
pub fn generate_family(k: u32, ground: Ground) -> Result<Vec<IndexSet>> {
    // Validate k even when the range below would be empty.
    IndexSet::new(k, 0, ground)?;
    (0..k).map(|bit| IndexSet::new(k, bit, ground)).collect()
}

/// A Boolean cell `N_1^e1 ∩ ... ∩ N_k^ek`, stored as residues modulo a period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    residues: Vec<u64>,
    period: u64,
    ground: Ground,
}

/// The cell of `family` selected by `signature` (`true` = the set, `false` = its complement).
pub fn cell(family: &[IndexSet], signature: &[bool]) -> Result<Cell> {
    if family.len() != signature.len() {
        return Err(Error::domain(format!(
            "signature length {} does not match family size {}",
            signature.len(),
            family.len()
        )));
    }
    let ground = family.first().map(|s| s.ground).unwrap_or(Ground::NaturalsWithZero);
    if family.iter().any(|s| s.ground != ground) {
        return Err(Error::domain("index sets over different ground sets"));
    }
    let period = family.iter().map(IndexSet::period).max().unwrap_or(1);
    let residues: Vec<u64> = (0..period)
        .filter(|&r| {
            family
                .iter()
                .zip(signature)
                .all(|(set, &want)| set.rule_holds(r) == want)
        })
        .collect();
    if residues.is_empty() {
        return Err(Error::domain("empty Boolean cell (repeated or conflicting sets)"));
    }
    Ok(Cell {
        residues,
        period,
        ground,
    })
}

/// The cell that isolates `family[lead]`: in that set, outside all others.
pub fn isolating_cell(family: &[IndexSet], lead: usize) -> Result<Cell> {
    let signature: Vec<bool> = (0..family.len()).map(|i| i == lead).collect();
    cell(family, &signature)
}

impl Cell {
    pub fn contains(&self, m: u64) -> bool {
        self.ground.admits(m) && self.residues.binary_search(&(m % self.period)).is_ok()
    }

    /// Members in increasing order; never exhausts.
    pub fn iter(&self) -> CellIter<'_> {
        CellIter {
            cell: self,
            block: 0,
            idx: 0,
        }
    }

    pub fn first(&self) -> u64 {
        self.iter().next().expect("cells are infinite")
    }

    /// Smallest member strictly greater than `n`.
    pub fn next_after(&self, n: u64) -> u64 {
        let block = n / self.period;
        let r = n % self.period;
        let idx = self.residues.partition_point(|&x| x <= r);
        let mut it = CellIter {
            cell: self,
            block,
            idx,
        };
        it.next().expect("cells are infinite")
    }

    /// Members not exceeding `bound`.
    pub fn members_up_to(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&m| m <= bound).collect()
    }
}

pub struct CellIter<'a> {
    cell: &'a Cell,
    block: u64,
    idx: usize,
}

impl Iterator for CellIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.idx == self.cell.residues.len() {
                self.idx = 0;
                self.block += 1;
            }
            let m = self.block * self.cell.period + self.cell.residues[self.idx];
            self.idx += 1;
            if self.cell.ground.admits(m) {
                return Some(m);
            }
        }
    }
}
