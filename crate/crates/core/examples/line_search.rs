//! Nominal, basic line search and projected line search on one random
//! nonnegative-feasibility instance.

use gapls::bench::{generate_instance, run_one, ExperimentSpec, Mode};
use gapls::{LineSearchConfig, Strategy, TriggerRule};

fn main() -> gapls::Result<()> {
    let spec = ExperimentSpec { seed: 2, ..Default::default() };
    let instance = generate_instance(&spec)?;

    let default = LineSearchConfig::default();
    let golden = LineSearchConfig { strategy: Strategy::GoldenSection, ..Default::default() };
    let aligned = LineSearchConfig { trigger_rule: TriggerRule::Aligned, ..golden.clone() };

    let runs = [
        (1.0, Mode::Nominal, &default, "nominal"),
        (1.0, Mode::Basic, &default, "basic"),
        (1.95, Mode::Nominal, &default, "nominal"),
        (1.95, Mode::Projected, &default, "projected, forward"),
        (1.95, Mode::Projected, &golden, "projected, golden"),
        (1.95, Mode::Projected, &aligned, "projected, golden, aligned trigger"),
        (2.0, Mode::Projected, &default, "projected, forward"),
    ];
    println!("{:>6} {:>36} {:>10} {:>10} {:>9}", "α₁=α₂", "method", "iterations", "triggered", "accepted");
    for (a1, mode, ls, label) in runs {
        let (rec, _) = run_one(&instance, a1, None, mode, ls, 200_000)?;
        println!(
            "{a1:>6.2} {label:>36} {:>10} {:>10} {:>9}{}",
            rec.iterations,
            rec.ls_triggered,
            rec.ls_accepted,
            if rec.converged { "" } else { "  (not converged)" }
        );
    }
    Ok(())
}
