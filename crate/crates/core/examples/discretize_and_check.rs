//! Turning a real map into a sign field and checking the hypotheses the
//! solvers rely on, before solving.

use monoroot::discretize::{
    check_delta_continuity, check_monotonicity, check_positive_switching, discretize, lipschitz_spot_check,
    CheckConfig, DiscretizationParams,
};
use monoroot::domain::MonotoneProfile;
use monoroot::{BoxDomain, RealOracle};

fn main() -> monoroot::Result<()> {
    let f = RealOracle::new(2, |x: &[f64]| {
        vec![x[0] - 0.3 * x[1] - 0.2 + 0.05 * (6.0 * x[0]).sin(), 1.5 * x[1] - 0.4 * x[0] - 0.5]
    });
    let domain = BoxDomain::unit(2);
    let observed = lipschitz_spot_check(&f, &domain, 1e-3, 5000, false, 0)?;
    println!("observed max-norm slope {observed:.3}");
    let params = DiscretizationParams::new(1e-3, 1.9, &domain)?;
    println!("epsilon {}, L {}, delta {}", params.epsilon, params.lipschitz, params.delta);
    let grid = params.grid(&domain)?;
    let signs = discretize(&f, params.epsilon, &grid);
    let cfg = CheckConfig::default();
    for report in [
        check_delta_continuity(&signs, &cfg)?,
        check_positive_switching(&signs, &cfg)?,
        check_monotonicity(&signs, &MonotoneProfile::canonical(2), &cfg)?,
    ] {
        println!(
            "{:<20} {:?} over {} points: {}/{} conditions hold",
            report.property,
            report.mode,
            report.points_checked,
            report.holding_count(),
            report.conditions.len()
        );
    }
    Ok(())
}
