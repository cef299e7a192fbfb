//! Van der Put coefficients of the log ladder and the two growth criteria.

use padic_zoo::families::{Ground, IndexSet};
use padic_zoo::padic::{PadicNumber, Prime};
use padic_zoo::vanderput::{csv_row, lip_criterion, n1_criterion, VdPSeries, CSV_HEADER};
use padic_zoo::zoo::ladder::{ladder_function, sigma_rows};

fn main() -> padic_zoo::Result<()> {
    let p = Prime::new(2)?;
    let series = VdPSeries::new(ladder_function(IndexSet::all(Ground::NaturalsWithZero)), p, 64);

    println!("{CSV_HEADER}");
    for row in sigma_rows(&series, 12, 2.0)? {
        println!("{}", csv_row(&row));
    }

    let n1 = n1_criterion(&series, 4096)?;
    for w in &n1.windows {
        println!("max |a_n| n on [{}, {}] = {:.4}", w.start, w.end, w.max);
    }
    println!("decaying: {}", n1.decaying);
    println!("sup |a_n| n^2 up to 4096: {:.1}", lip_criterion(&series, 2.0, 4096)?.sup());

    let x = PadicNumber::from_rational(1, 3, p, 20)?;
    println!("partial sum at 1/3 through n = 255: {}", series.partial_sum(255, &x)?);
    Ok(())
}
