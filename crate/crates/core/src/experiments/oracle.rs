use crate::conductivity::ConductivityField;

/// Points per axis of the oracle grid.
pub const ORACLE_GRID: usize = 101;

/// Max over a `101 × 101` grid, restricted to the disk of radius `1 − 2h`, of
/// `|∂_x(σ ∂_x u) + ∂_y(σ ∂_y u)|` by nested central differences:
///
/// `[σ(x+h/2)(u(x+h) − u(x)) − σ(x−h/2)(u(x) − u(x−h))] / h²` plus the same in
/// `y`.
pub fn fd_conductivity_residual(
    sigma: &dyn ConductivityField,
    u: &dyn Fn(f64, f64) -> f64,
    h: f64,
) -> f64 {
    let radius = 1.0 - 2.0 * h;
    let step = 2.0 * radius / (ORACLE_GRID - 1) as f64;
    let mut worst = 0.0f64;
    for i in 0..ORACLE_GRID {
        let x = -radius + i as f64 * step;
        for j in 0..ORACLE_GRID {
            let y = -radius + j as f64 * step;
            if x * x + y * y > radius * radius {
                continue;
            }
            let u0 = u(x, y);
            let flux_x = sigma.sigma(x + h / 2.0, y) * (u(x + h, y) - u0)
                - sigma.sigma(x - h / 2.0, y) * (u0 - u(x - h, y));
            let flux_y = sigma.sigma(x, y + h / 2.0) * (u(x, y + h) - u0)
                - sigma.sigma(x, y - h / 2.0) * (u0 - u(x, y - h));
            worst = worst.max(((flux_x + flux_y) / (h * h)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conductivity::{AnalyticConductivity, ConductivityId};

    fn exact(model: AnalyticConductivity) -> impl Fn(f64, f64) -> f64 {
        move |x, y| model.exact_u(x, y).expect("oracle stays inside the disk")
    }

    #[test]
    fn linear_solution_of_unit_conductivity_is_exact() {
        let unit = AnalyticConductivity::unit();
        let r = fd_conductivity_residual(&unit, &|x, _| x, 1e-2);
        assert!(r <= 1e-10, "{r}");
    }

    #[test]
    fn non_exponential_pairs_converge_at_second_order() {
        use ConductivityId::*;
        for id in [Lorentzian, LorentzianXy, Polynomial, Sinusoidal] {
            let m = AnalyticConductivity::new(id);
            let u = exact(m);
            let coarse = fd_conductivity_residual(&m, &u, 1e-2);
            let fine = fd_conductivity_residual(&m, &u, 5e-3);
            let ratio = coarse / fine;
            assert!((3.2..=4.8).contains(&ratio), "{id:?}: ratio {ratio}");
        }
    }

    #[test]
    fn exponential_pairs_are_differenced_exactly() {
        // σ·∂u is constant along each axis and both half-step fluxes agree
        // exactly, leaving only rounding.
        for id in [ConductivityId::Exponential, ConductivityId::ExponentialXy] {
            let m = AnalyticConductivity::new(id);
            for h in [1e-2, 5e-3, 1e-3] {
                let r = fd_conductivity_residual(&m, &exact(m), h);
                assert!(r < 1e-8, "{id:?}, h = {h}: {r}");
            }
        }
    }

    #[test]
    fn wrong_solution_is_detected() {
        let m = AnalyticConductivity::new(ConductivityId::Exponential);
        let r = fd_conductivity_residual(&m, &|x, y| (x + y).exp(), 1e-2);
        assert!(r > 1e-1);
    }
}
