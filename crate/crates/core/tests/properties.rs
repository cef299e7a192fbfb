//! Property tests for the arithmetic, the families, the quotients, the van
//! der Put machinery and the zoo.

use num_bigint::BigUint;
use proptest::prelude::*;

use padic_zoo::families::{cell, generate_family, Ground};
use padic_zoo::haar::{e_prefix_series, estimate_y0};
use padic_zoo::padic::{pow_one_plus, Norm, PadicNumber, Prime};
use padic_zoo::quotient::{linear_combination, monomial, phi_r, probe_derivative, Domain, Func, SharedFn};
use padic_zoo::vanderput::{drop_leading_digit, VdPSeries};
use padic_zoo::zoo::balls::{build_disjoint_balls, leading_one_balls, sphere_point_balls, square_spheres};
use padic_zoo::zoo::spikes::spike_function;
use padic_zoo::zoo::spread::spread_function;
use padic_zoo::zoo::{entry, ZooConfig};

fn small_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

/// Digits below `p` with a nonzero leading digit.
fn unit_digits(p: Prime, len: usize) -> impl Strategy<Value = Vec<u32>> {
    let p = p.get();
    (1..p, prop::collection::vec(0..p, len - 1)).prop_map(|(lead, mut rest)| {
        rest.insert(0, lead);
        rest
    })
}

/// An exact nonzero number with valuation in `-6..=6`.
fn exact_number() -> impl Strategy<Value = (PadicNumber, i64)> {
    small_prime().prop_flat_map(|p| {
        (unit_digits(p, 6), -6i64..=6).prop_map(move |(d, v)| {
            (PadicNumber::from_finite_digits(p, v, &d, v + 6).unwrap(), v)
        })
    })
}

/// Two inexact views of one number: `n` and `2n` digits from valuation `v`.
fn two_precisions(p: Prime, v: i64, n: usize) -> impl Strategy<Value = (PadicNumber, PadicNumber)> {
    unit_digits(p, 2 * n).prop_map(move |d| {
        let lo = PadicNumber::from_digits(p, v, &d[..n], v + n as i64).unwrap();
        let hi = PadicNumber::from_digits(p, v, &d, v + 2 * n as i64).unwrap();
        (lo, hi)
    })
}

fn same_prime_pair() -> impl Strategy<Value = (PadicNumber, PadicNumber, i64, i64)> {
    small_prime().prop_flat_map(|p| {
        (unit_digits(p, 6), -6i64..=6, unit_digits(p, 6), -6i64..=6).prop_map(move |(a, va, b, vb)| {
            (
                PadicNumber::from_finite_digits(p, va, &a, va + 6).unwrap(),
                PadicNumber::from_finite_digits(p, vb, &b, vb + 6).unwrap(),
                va,
                vb,
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_multiplicative_and_ultrametric((x, y, vx, vy) in same_prime_pair()) {
        let p = x.prime().get();
        let (nx, ny) = (x.norm().unwrap(), y.norm().unwrap());
        prop_assert_eq!(nx, Norm::from_valuation(p, vx));
        prop_assert_eq!(ny, Norm::from_valuation(p, vy));
        prop_assert_eq!(x.mul(&y).unwrap().norm().unwrap(), nx * ny);
        let s = x.add(&y).unwrap().norm().unwrap();
        prop_assert!(s <= nx.max(ny));
        if nx != ny {
            prop_assert_eq!(s, nx.max(ny));
        }
    }

    #[test]
    fn exact_division_inverts_multiplication((x, y, _, _) in same_prime_pair()) {
        let q = x.mul(&y).unwrap().div(&y).unwrap();
        prop_assert_eq!(q.exact_eq(&x), Some(true));
    }

    #[test]
    fn text_round_trip((x, _) in exact_number()) {
        let back = padic_zoo::padic::text::parse(&x.to_string(), x.prime(), 64).unwrap();
        prop_assert_eq!(back.exact_eq(&x), Some(true));
        let inexact = x.forget_exact().at_precision(x.render_precision());
        let back = padic_zoo::padic::text::parse(&inexact.to_string(), x.prime(), 64).unwrap();
        prop_assert!(back.same_representation(&inexact));
    }

    #[test]
    fn binomial_power_lands_in_one_plus_p_zp(
        (y, alpha) in small_prime().prop_flat_map(|p| (unit_digits(p, 8), 1i64..4, unit_digits(p, 8))
            .prop_map(move |(d, v, a)| (
                PadicNumber::from_finite_digits(p, v, &d, v + 8).unwrap(),
                PadicNumber::from_finite_digits(p, 0, &a, 8).unwrap(),
            )))
    ) {
        let r = pow_one_plus(&y, &alpha, 24).unwrap();
        prop_assert_eq!(r.digit(0).unwrap(), 1);
        let rest = r.sub(&PadicNumber::one(y.prime(), 24)).unwrap();
        prop_assert!(rest.is_zero_to_precision() || rest.valuation().unwrap() >= 1);
    }

    #[test]
    fn binomial_finite_differences(
        (y, alpha, j) in small_prime().prop_flat_map(|p| (unit_digits(p, 6), unit_digits(p, 6), 2i64..10)
            .prop_map(move |(d, a, j)| (
                PadicNumber::from_finite_digits(p, 1, &d, 7).unwrap(),
                PadicNumber::from_finite_digits(p, 0, &a, 6).unwrap(),
                j,
            )))
    ) {
        let p = y.prime();
        let h = PadicNumber::p_power(p, j, 1);
        let prec = 40;
        let f0 = pow_one_plus(&y, &alpha, prec).unwrap();
        let f1 = pow_one_plus(&y.add(&h).unwrap(), &alpha, prec).unwrap();
        let q = f1.sub(&f0).unwrap().div(&h).unwrap();
        let am1 = alpha.sub(&PadicNumber::one(p, 1)).unwrap();
        let d = pow_one_plus(&y, &am1, prec).unwrap().mul(&alpha).unwrap();
        prop_assert!(q.sub(&d).unwrap().norm_bound() <= h.norm().unwrap());
    }

    #[test]
    fn higher_precision_agrees(
        (p, v1, v2) in (small_prime(), -3i64..3, -3i64..3)
            .prop_flat_map(|(p, v1, v2)| (Just(p), two_precisions(p, v1, 10), two_precisions(p, v2, 10)))
    ) {
        let ((a_lo, a_hi), (b_lo, b_hi)) = (v1, v2);
        prop_assert!(a_hi.add(&b_hi).unwrap().agrees_with(&a_lo.add(&b_lo).unwrap()));
        prop_assert!(a_hi.mul(&b_hi).unwrap().agrees_with(&a_lo.mul(&b_lo).unwrap()));
        prop_assert!(a_hi.div(&b_hi).unwrap().agrees_with(&a_lo.div(&b_lo).unwrap()));
        prop_assert!(a_hi.powi(3).unwrap().agrees_with(&a_lo.powi(3).unwrap()));
        // (1 + p a)^b needs p a in pZ_p and b in Z_p
        let (ya, yb) = (a_lo.shift(1 - a_lo.valuation().unwrap()), a_hi.shift(1 - a_hi.valuation().unwrap()));
        let (ba, bb) = (b_lo.shift(-b_lo.valuation().unwrap()), b_hi.shift(-b_hi.valuation().unwrap()));
        let lo = pow_one_plus(&ya, &ba, 40).unwrap();
        let hi = pow_one_plus(&yb, &bb, 40).unwrap();
        prop_assert!(hi.agrees_with(&lo));
        prop_assert_eq!(p, lo.prime());
    }

    #[test]
    fn quotients_are_symmetric(
        pts in small_prime().prop_flat_map(|p| prop::collection::vec((unit_digits(p, 5), -3i64..4), 3)
            .prop_map(move |v| v.into_iter()
                .map(|(d, val)| PadicNumber::from_finite_digits(p, val, &d, val + 5).unwrap())
                .collect::<Vec<_>>()))
    ) {
        let distinct = (0..3).all(|i| (i + 1..3).all(|j| pts[i].exact_eq(&pts[j]) == Some(false)));
        prop_assume!(distinct);
        let f = monomial(4);
        let q01 = phi_r(&*f, &pts[..2]).unwrap();
        let q10 = phi_r(&*f, &[pts[1].clone(), pts[0].clone()]).unwrap();
        prop_assert_eq!(q01.exact_eq(&q10), Some(true));
        let base = phi_r(&*f, &pts).unwrap();
        for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let q = phi_r(&*f, &perm.map(|i| pts[i].clone())).unwrap();
            prop_assert_eq!(q.exact_eq(&base), Some(true));
        }
    }

    #[test]
    fn spread_quotients_are_bounded_by_the_gap(
        (bits, x, cut, tail) in small_prime().prop_flat_map(|p| (
            (1u32..=4).prop_flat_map(|k| (Just(k), 0..k)),
            prop::collection::vec(0..p.get(), 20),
            0i64..20,
            unit_digits(p, 6),
        ).prop_map(move |(b, x, c, t)| (
            b,
            PadicNumber::from_finite_digits(p, 0, &x, 20).unwrap(),
            c,
            PadicNumber::from_finite_digits(p, c, &t, c + 6).unwrap(),
        )))
    ) {
        let set = padic_zoo::families::IndexSet::new(bits.0, bits.1, Ground::NaturalsWithZero).unwrap();
        let g = spread_function(set, 64);
        let y = x.truncation_below(cut).unwrap().add(&tail).unwrap();
        prop_assume!(x.exact_eq(&y) == Some(false));
        let q = phi_r(&*g, &[x.clone(), y.clone()]).unwrap();
        prop_assert!(q.norm().unwrap() <= x.sub(&y).unwrap().norm().unwrap());
    }

    #[test]
    fn verdicts_survive_doubled_precision(
        (lo, hi) in small_prime().prop_flat_map(|p| two_precisions(p, 0, 12))
    ) {
        // x^2 at x: the quotient along h = p^j converges to 2x
        let f = monomial(2);
        let p = lo.prime();
        let seq = |x: PadicNumber| (2..10u64).map(move |j| (j, x.add(&PadicNumber::p_power(p, j as i64, 1)).unwrap()));
        let a = probe_derivative(&*f, &lo, seq(lo.clone()), 8).unwrap().verdict;
        let b = probe_derivative(&*f, &hi, seq(hi.clone()), 8).unwrap().verdict;
        let flipped = matches!((a.kind(), b.kind()), ("converges_to", "diverges") | ("diverges", "converges_to"));
        prop_assert!(!flipped);
    }

    #[test]
    fn van_der_put_partial_sums_reconstruct(
        (name, p, n_max, m) in (
            prop::sample::select(vec!["spikes", "digit-spread", "log-ladder", "pair-truncation", "identity", "square-spheres"]),
            small_prime(),
            1u64..150,
        ).prop_flat_map(|(name, p, n)| (Just(name), Just(p), Just(n), 0..=n))
    ) {
        let e = entry(name, &ZooConfig::new(p)).unwrap();
        let series = VdPSeries::new(e.function.clone(), p, 64);
        let x = PadicNumber::from_integer(m, p, 64);
        let sum = series.partial_sum(n_max, &x).unwrap();
        prop_assert_eq!(sum.exact_eq(&e.function.eval(&x).unwrap()), Some(true), "{} at {}", name, m);
    }

    #[test]
    fn coefficients_are_local(
        (p, n, r, c) in small_prime().prop_flat_map(|p| (Just(p), 2u64..400, 0u64..400, 1i64..50))
    ) {
        // Adding c on the ball r + p^L Z_p, disjoint from the parent ball of n, leaves a_n alone.
        let nb = BigUint::from(n);
        let len = padic_zoo::vanderput::digit_length(p, &nb) as u64;
        let parent = p.pow(len - 1);
        let big_r = BigUint::from(r);
        prop_assume!(&big_r % &parent != &nb % &parent);
        let level = len as i64 - 1;
        let center = PadicNumber::from_integer(r, p, 64);
        let bump = Func::new(Domain::Zp, move |x: &PadicNumber| {
            let inside = x.sub(&center)?.valuation().is_none_or(|v| v >= level);
            Ok(if inside { PadicNumber::one(x.prime(), 1) } else { PadicNumber::zero(x.prime()) })
        }).shared();
        let f = entry("log-ladder", &ZooConfig::new(p)).unwrap().function;
        let g: SharedFn = linear_combination(vec![
            (PadicNumber::one(p, 64), f.clone()),
            (PadicNumber::from_integer(c, p, 64), bump),
        ]).unwrap();
        let a = VdPSeries::new(f, p, 64).coefficient(&nb).unwrap();
        let b = VdPSeries::new(g, p, 64).coefficient(&nb).unwrap();
        prop_assert_eq!(a.exact_eq(&b), Some(true));
        prop_assert!(drop_leading_digit(p, &nb) < nb);
    }

    #[test]
    fn combinations_isolate_the_lead(
        (k, lead, p, coeffs) in (1u32..=4).prop_flat_map(|k| (
            Just(k), 0..k as usize, small_prime(), prop::collection::vec(1i64..1000, k as usize),
        ))
    ) {
        let cs: Vec<PadicNumber> = coeffs.iter().map(|&c| PadicNumber::from_integer(c, p, 64)).collect();
        for ground in [Ground::Naturals, Ground::NaturalsWithZero] {
            let family = generate_family(k, ground).unwrap();
            let n = padic_zoo::families::isolating_cell(&family, lead).unwrap().first();
            let x = PadicNumber::p_power(p, n as i64, 64);
            let want = cs[lead].mul(&PadicNumber::p_power(p, 2 * n as i64, 1)).unwrap();
            let terms: Vec<(PadicNumber, SharedFn)> = match ground {
                Ground::Naturals => family.iter().zip(&cs).map(|(s, c)| (c.clone(), spike_function(*s))).collect(),
                Ground::NaturalsWithZero => family.iter().zip(&cs).map(|(s, c)| (c.clone(), spread_function(*s, 64))).collect(),
            };
            let f = linear_combination(terms).unwrap();
            prop_assert_eq!(f.eval(&x).unwrap().exact_eq(&want), Some(true));
        }
    }

    #[test]
    fn haar_reports_are_reproducible_and_monotone(
        (p, seed) in (prop::sample::select(vec![2u64, 3, 5]), any::<u64>())
    ) {
        let p = Prime::new(p).unwrap();
        let a = e_prefix_series(p, 6, 500, seed).unwrap();
        let b = e_prefix_series(p, 6, 500, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.windows(2).all(|w| w[1].estimate <= w[0].estimate));
        prop_assert_eq!(estimate_y0(p, 300, seed).unwrap(), estimate_y0(p, 300, seed).unwrap());
    }
}

#[test]
fn cells_have_one_residue_per_period() {
    for k in 1..=10u32 {
        let family = generate_family(k, Ground::NaturalsWithZero).unwrap();
        let period = 1u64 << k;
        for mask in 0..period {
            let sig: Vec<bool> = (0..k).map(|i| (mask >> i) & 1 == 1).collect();
            let c = cell(&family, &sig).unwrap();
            let members = c.members_up_to(period - 1);
            assert_eq!(members.len(), 1, "k = {k}, signature {mask:b}");
            // membership agrees with the sets themselves
            for m in 0..period {
                let by_sets = family.iter().zip(&sig).all(|(s, &e)| s.contains(m) == e);
                assert_eq!(c.contains(m), by_sets);
            }
        }
    }
}

#[test]
fn ball_systems_are_disjoint_up_to_50() {
    for p in [2u64, 3, 5, 7] {
        let p = Prime::new(p).unwrap();
        assert!(build_disjoint_balls(p, 50).0.pairwise_disjoint().unwrap());
        assert!(sphere_point_balls(p, 50).pairwise_disjoint().unwrap());
        assert!(leading_one_balls(p, 50).pairwise_disjoint().unwrap());
        assert!(square_spheres(p, 50).pairwise_disjoint().unwrap());
    }
}
