//! Homogeneous degree-1 Fourier multipliers P(D).

use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SymbolSpec {
    /// P(ξ) = iξ₁.
    #[default]
    Scalar1,
    /// P(ξ) = i|ξ|·χ(ξ/|ξ|), χ(ω) = (1 + ω_d)/2 along the last axis.
    ScalarCone,
    /// −½ℙ∇· acting on symmetric tensors; vector fields only.
    LerayDiv,
}

impl SymbolSpec {
    pub fn is_vector(&self) -> bool {
        matches!(self, SymbolSpec::LerayDiv)
    }

    /// P(ξ) for scalar symbols.
    pub fn eval(&self, xi: [f64; 3], dim: usize) -> Result<Complex64> {
        match self {
            SymbolSpec::Scalar1 => Ok(Complex64::new(0.0, xi[0])),
            SymbolSpec::ScalarCone => {
                let r = libm::sqrt(xi[..dim].iter().map(|v| v * v).sum());
                Ok(Complex64::new(0.0, 0.5 * (r + xi[dim - 1])))
            }
            SymbolSpec::LerayDiv => Err(LabError::Shape(
                "vector symbol applied to a scalar field".into(),
            )),
        }
    }
}

/// coef'(ξ) = P(ξ) coef(ξ), zero mode set to 0.
pub fn apply_symbol(f: &SpectralField, sym: SymbolSpec) -> Result<SpectralField> {
    if sym.is_vector() {
        return Err(LabError::Shape(
            "vector symbol applied to a scalar field".into(),
        ));
    }
    let g = f.grid;
    let mut out = f.clone();
    for (i, c) in out.coef_mut().iter_mut().enumerate() {
        if *c != Complex64::new(0.0, 0.0) {
            *c *= sym.eval(g.wavevector(i), g.dim)?;
        }
    }
    out.coef_mut()[0] = Complex64::new(0.0, 0.0);
    out.mean_zero = true;
    Ok(out)
}

/// Leray-projected divergence −½ℙ∇·(u⊗v + v⊗u) for vector fields with `dim`
/// components given as spectral products w_ab = (u_a v_b + v_a u_b).
pub fn leray_div(sym_products: &[Vec<SpectralField>]) -> Result<Vec<SpectralField>> {
    let d = sym_products.len();
    if d == 0 || sym_products.iter().any(|r| r.len() != d) {
        return Err(LabError::Shape("product tensor must be square".into()));
    }
    let g = sym_products[0][0].grid;
    if g.dim != d {
        return Err(LabError::Shape(
            "tensor rank must match grid dimension".into(),
        ));
    }
    let mut out: Vec<SpectralField> = (0..d).map(|_| SpectralField::zeros(g)).collect();
    for i in 1..g.len() {
        let xi = g.wavevector(i);
        let x2: f64 = xi[..d].iter().map(|v| v * v).sum();
        // div: q_a = Σ_b iξ_b w_ab
        let mut q = [Complex64::new(0.0, 0.0); 3];
        for a in 0..d {
            for b in 0..d {
                q[a] += Complex64::new(0.0, xi[b]) * sym_products[a][b].coef()[i];
            }
        }
        let dot: Complex64 = (0..d).map(|a| q[a] * xi[a]).sum();
        for a in 0..d {
            let proj = q[a] - dot * xi[a] / x2;
            out[a].coef_mut()[i] = -0.5 * proj;
        }
    }
    Ok(out)
}
