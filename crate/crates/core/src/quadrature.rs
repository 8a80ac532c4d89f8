//! One-dimensional quadrature: fixed Gauss-Legendre panels, an adaptive
//! Gauss-Kronrod rule, and graded meshes for integrable endpoint
//! singularities of the form `x^{-γ}`, `γ < 1`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// 16-point Gauss-Legendre abscissae on `[0, 1]` folded to positive half.
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

/// Gauss-Kronrod 7-15 abscissae (positive half, descending).
const K15_X: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const K15_W: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const G7_W: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Single 16-point Gauss-Legendre panel over `[a, b]`.
pub fn gauss16<S: Scalar, F: Fn(S) -> S>(f: &F, a: S, b: S) -> S {
    let half = S::lit(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let mut acc = S::zero();
    for i in 0..8 {
        let x = S::lit(GL16_X[i]) * h;
        let w = S::lit(GL16_W[i]);
        acc = acc + w * (f(c + x) + f(c - x));
    }
    acc * h
}

/// Composite 16-point Gauss-Legendre rule with `panels` equal panels.
pub fn composite_gauss16<S: Scalar, F: Fn(S) -> S>(f: &F, a: S, b: S, panels: usize) -> S {
    let n = S::from_usize(panels.max(1)).unwrap();
    let h = (b - a) / n;
    let mut acc = S::zero();
    let mut lo = a;
    for j in 1..=panels.max(1) {
        let hi = if j == panels { b } else { a + h * S::from_usize(j).unwrap() };
        acc = acc + gauss16(f, lo, hi);
        lo = hi;
    }
    acc
}

/// Composite Gauss rule over `[0, upper]` on a mesh graded toward zero
/// through the substitution `x = upper · s^g`:
///
/// ```text
/// ∫₀^U f(x) dx = ∫₀^1 f(U s^g) · U g s^{g-1} ds,
/// ```
///
/// integrated with uniform panels in `s`.  For `f ~ x^{-γ}` and
/// `g ≥ (d+1)/(1-γ)` the transformed integrand behaves like `s^d`, so the
/// rule converges at its full order despite the endpoint singularity.
pub fn graded_gauss16<S: Scalar, F: Fn(S) -> S>(
    f: &F,
    upper: S,
    grading: S,
    panels: usize,
) -> S {
    let m = panels.max(1);
    let transformed = |s: S| {
        let x = upper * s.powf(grading);
        if x <= S::zero() {
            return S::zero();
        }
        f(x) * upper * grading * s.powf(grading - S::one())
    };
    let mut acc = S::zero();
    for j in 0..m {
        let lo = S::from_usize(j).unwrap() / S::from_usize(m).unwrap();
        let hi = S::from_usize(j + 1).unwrap() / S::from_usize(m).unwrap();
        acc = acc + gauss16(&transformed, lo, hi);
    }
    acc
}

fn gk15<S: Scalar, F: Fn(S) -> S>(f: &F, a: S, b: S) -> (S, S) {
    let half = S::lit(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let mut k15 = S::zero();
    let mut g7 = S::zero();
    for i in 0..8 {
        let xi = S::lit(K15_X[i]) * h;
        let pair = if i == 7 { f(c) } else { f(c + xi) + f(c - xi) };
        k15 = k15 + S::lit(K15_W[i]) * pair;
        if i % 2 == 1 {
            g7 = g7 + S::lit(G7_W[i / 2]) * pair;
        }
    }
    (k15 * h, g7 * h)
}

/// Adaptive Gauss-Kronrod integration over `[a, b]`.
///
/// Bisects until the local Kronrod error estimate falls under the budget;
/// exhausting the depth limit reports non-convergence instead of returning a
/// silently inaccurate value.
pub fn adaptive_gk<S: Scalar, F: Fn(S) -> S>(
    f: &F,
    a: S,
    b: S,
    rel_tol: S,
    abs_tol: S,
) -> Result<S> {
    if a == b {
        return Ok(S::zero());
    }
    let (whole, _) = gk15(f, a, b);
    let tol = abs_tol.max(rel_tol * whole.abs());
    adaptive_rec(f, a, b, whole, tol, 48)
}

fn adaptive_rec<S: Scalar, F: Fn(S) -> S>(
    f: &F,
    a: S,
    b: S,
    whole: S,
    tol: S,
    depth: u32,
) -> Result<S> {
    let mid = (a + b) * S::lit(0.5);
    let (left, _) = gk15(f, a, mid);
    let (right, _) = gk15(f, mid, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol || mid <= a || mid >= b {
        return Ok(refined);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence {
            sample: mid.as_f64(),
            detail: format!(
                "interval [{:e}, {:e}] did not converge to tolerance {:e}",
                a.as_f64(),
                b.as_f64(),
                tol.as_f64()
            ),
        });
    }
    let half_tol = tol * S::lit(0.5);
    let l = adaptive_rec(f, a, mid, left, half_tol, depth - 1)?;
    let r = adaptive_rec(f, mid, b, right, half_tol, depth - 1)?;
    Ok(l + r)
}

/// Integrates over `[0, upper]` with a singularity of strength `x^{-γ}` at
/// the origin.  Uses the graded mesh with a grading exponent matched to `γ`
/// and doubles the panel count until two levels agree to `rel_tol`.
pub fn singular_lower<S: Scalar, F: Fn(S) -> S>(
    f: &F,
    upper: S,
    gamma: S,
    rel_tol: S,
) -> Result<S> {
    if upper <= S::zero() {
        return Ok(S::zero());
    }
    let one = S::one();
    let strength = gamma.max(S::zero()).min(S::lit(0.995));
    let grading = (S::lit(8.0) / (one - strength)).max(S::lit(4.0)).min(S::lit(400.0));
    let mut panels = 24usize;
    let mut prev = graded_gauss16(f, upper, grading, panels);
    for _ in 0..4 {
        panels *= 2;
        let next = graded_gauss16(f, upper, grading, panels);
        let scale = next.abs().max(prev.abs());
        if (next - prev).abs() <= rel_tol * scale || scale == S::zero() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence {
        sample: upper.as_f64(),
        detail: format!(
            "graded mesh on [0, {:e}] stalled at {} panels",
            upper.as_f64(),
            panels
        ),
    })
}
