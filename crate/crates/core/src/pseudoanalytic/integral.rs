use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cumulative `(F,G)`-integral of `W` along one ray for the pair
/// `(F, G) = (p, i/p)`:
///
/// `∫ W d_(F,G) z = F(z)·Re ∫ G*·W dz + G(z)·Re ∫ F*·W dz`,
///
/// with the adjoint pair `F* = −iF`, `G* = −iG = 1/p`. Both path integrals are
/// accumulated with the trapezoidal rule on uniform nodes separated by `dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct FgIntegral {
    cumulative: Vec<Complex64>,
}

impl FgIntegral {
    /// Values at every node, starting with `0` at the first node.
    pub fn cumulative(&self) -> &[Complex64] {
        &self.cumulative
    }

    pub fn end(&self) -> Complex64 {
        *self.cumulative.last().expect("at least two nodes")
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.cumulative
    }
}

pub fn fg_integral(w: &[Complex64], p: &[f64], dz: Complex64) -> Result<FgIntegral> {
    let mut out = Vec::with_capacity(w.len());
    fg_integral_into(w, p, dz, 1.0, &mut out)?;
    Ok(FgIntegral { cumulative: out })
}

/// Writes `scale · ∫ W d_(F,G) z` at every node into `out`.
#[allow(clippy::needless_range_loop)]
pub(crate) fn fg_integral_into(
    w: &[Complex64],
    p: &[f64],
    dz: Complex64,
    scale: f64,
    out: &mut Vec<Complex64>,
) -> Result<()> {
    if w.len() != p.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: p.len(),
        });
    }
    if w.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: w.len(),
        });
    }
    out.clear();
    let half_dz = 0.5 * dz;
    // Integrands G*·W = W/p and F*·W = −i p W.
    let g_star_w = |k: usize| w[k] / p[k];
    let f_star_w = |k: usize| -I * p[k] * w[k];
    let mut acc_g = Complex64::new(0.0, 0.0);
    let mut acc_f = Complex64::new(0.0, 0.0);
    out.push(Complex64::new(0.0, 0.0));
    for k in 1..w.len() {
        acc_g += (g_star_w(k - 1) + g_star_w(k)) * half_dz;
        acc_f += (f_star_w(k - 1) + f_star_w(k)) * half_dz;
        let value = Complex64::new(p[k] * acc_g.re, acc_f.re / p[k]);
        out.push(scale * value);
    }
    Ok(())
}
