//! Sweeps α₁ = α₂ over 1.00, 1.05, …, 2.00 for each stepper and writes the
//! records as CSV.
//!
//! ```text
//! cargo run --release --example sweep -- [seed] [out.csv]
//! ```

use gapls::bench::{emit_csv, run_sweep, ExperimentSpec, Mode};

fn main() -> gapls::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(1, |s| s.parse().expect("seed must be an integer"));
    let out = args.next().unwrap_or_else(|| "sweep.csv".into());

    let mut records = Vec::new();
    for mode in [Mode::Nominal, Mode::Basic, Mode::Projected] {
        let spec = ExperimentSpec { seed, mode, max_iter: 100_000, ..Default::default() };
        records.extend(run_sweep(&spec)?);
    }
    emit_csv(&records, &out)?;
    records.sort_by(|a, b| a.alpha1.total_cmp(&b.alpha1).then(a.mode.cmp(&b.mode)));

    println!("{:>6} {:>10} {:>10} {:>10}", "α₁=α₂", "none", "basic", "projected");
    for chunk in records.chunks(3) {
        let cell = |i: usize| {
            let r = &chunk[i];
            if r.converged { r.iterations.to_string() } else { format!(">{}", r.iterations) }
        };
        println!("{:>6.2} {:>10} {:>10} {:>10}", chunk[0].alpha1, cell(0), cell(1), cell(2));
    }
    println!("wrote {out}");
    Ok(())
}
