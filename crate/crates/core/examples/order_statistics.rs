//! Print the distribution of the k-th free order statistic for a Pareto
//! base at a few sample sizes, next to its limit law.

use fevt::extremes::{finite_free_order_cdf, norming_constants, BaseDistribution};
use fevt::measures::EvtLaw;
use fevt::limit_free_order_cdf;

fn main() -> fevt::Result<()> {
    let base = BaseDistribution::pareto(1.0)?;
    let law = EvtLaw::frechet(1.0)?;
    let sched = norming_constants(&base, &law)?;
    let k = 0.5;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "t", "n=16", "n=64", "n=256", "limit");
    for j in 0..=20 {
        let t = 0.2 + 4.0 * j as f64 / 20.0;
        let cols: Vec<f64> = [16u64, 64, 256]
            .iter()
            .map(|&n| finite_free_order_cdf(&base, &sched, n, k, t))
            .collect::<fevt::Result<_>>()?;
        let lim = limit_free_order_cdf(&law, k, t)?;
        println!(
            "{t:>6.2} {:>10.6} {:>10.6} {:>10.6} {lim:>10.6}",
            cols[0], cols[1], cols[2]
        );
    }
    Ok(())
}
