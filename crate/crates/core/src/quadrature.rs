//! Globally adaptive Gauss-Kronrod (7/15) integration.
//!
//! Finite intervals are bisected worst-error-first until the summed error
//! estimate meets `max(abs_tol, rel_tol * |I|)`. Semi-infinite integrals are
//! truncated at a cut-off that doubles until a caller-supplied tail bound (or,
//! without one, two consecutive probe segments) falls below `tail_tol`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, QuadratureFailure, Result};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Absolute bound accepted for the truncated tail of a semi-infinite integral.
    pub tail_tol: f64,
    pub max_subintervals: usize,
    /// Equal panels the interval is cut into before adaptation starts.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            tail_tol: 1e-10,
            max_subintervals: 4000,
            initial_panels: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub subintervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn non_finite(routine: &'static str, a: f64, b: f64, x: f64, fx: f64, evaluations: usize) -> Error {
    Error::Quadrature(Box::new(QuadratureFailure {
        routine,
        lower: a,
        upper: b,
        estimate: f64::NAN,
        abs_error: f64::INFINITY,
        tolerance: 0.0,
        subintervals: 0,
        evaluations,
        reason: format!("integrand returned {fx} at x = {x:e}"),
    }))
}

/// One 15-point Kronrod panel with its QUADPACK-style error estimate.
fn kronrod_panel<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    evals: &mut usize,
) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [0.0f64; 15];
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x);
        *evals += 1;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(non_finite("gauss-kronrod", a, b, x, y, *evals))
        }
    };
    for (j, &node) in KRONROD_NODES.iter().enumerate().take(7) {
        fv[2 * j] = eval(center - half * node)?;
        fv[2 * j + 1] = eval(center + half * node)?;
    }
    fv[14] = eval(center)?;

    let f_center = fv[14];
    let mut kronrod = KRONROD_WEIGHTS[7] * f_center;
    let mut gauss = GAUSS_WEIGHTS[3] * f_center;
    let mut res_abs = kronrod.abs();
    for j in 0..7 {
        let pair = fv[2 * j] + fv[2 * j + 1];
        kronrod += KRONROD_WEIGHTS[j] * pair;
        res_abs += KRONROD_WEIGHTS[j] * (fv[2 * j].abs() + fv[2 * j + 1].abs());
        if j % 2 == 1 {
            gauss += GAUSS_WEIGHTS[j / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = KRONROD_WEIGHTS[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += KRONROD_WEIGHTS[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let scale = half.abs();
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: rescale_error((kronrod - gauss) * half, res_abs * scale, res_asc * scale),
    })
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(
            "integrate",
            format!("limits must be finite, got [{a}, {b}]"),
        ));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            subintervals: 0,
        });
    }
    let mut evals = 0usize;
    let panels = cfg.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(cfg.max_subintervals + panels);
    for k in 0..panels {
        let lo = a + width * k as f64;
        let hi = if k + 1 == panels {
            b
        } else {
            a + width * (k + 1) as f64
        };
        heap.push(kronrod_panel(&mut f, lo, hi, &mut evals)?);
    }

    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let tolerance = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= tolerance {
            return Ok(Integral {
                value,
                abs_error: error,
                evaluations: evals,
                subintervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        let exhausted = heap.len() + 2 > cfg.max_subintervals;
        if exhausted || mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return Err(Error::Quadrature(Box::new(QuadratureFailure {
                routine: "gauss-kronrod",
                lower: a,
                upper: b,
                estimate: value,
                abs_error: error,
                tolerance,
                subintervals: heap.len(),
                evaluations: evals,
                reason: if exhausted {
                    "subdivision limit reached".to_string()
                } else {
                    format!(
                        "interval [{:e}, {:e}] cannot be split further",
                        worst.a, worst.b
                    )
                },
            })));
        }
        heap.push(kronrod_panel(&mut f, worst.a, mid, &mut evals)?);
        heap.push(kronrod_panel(&mut f, mid, worst.b, &mut evals)?);
    }
}

/// Integrates `f` over `[a, inf)`.
///
/// The cut-off starts at `first_cut` and its distance from `a` doubles until
/// `tail_bound(cut)` (an upper bound on the integral beyond the cut) drops
/// below `cfg.tail_tol`. Without a bound, the cut grows until two successive
/// doubling segments each contribute less than `cfg.tail_tol`.
pub fn integrate_to_infinity<F, T>(
    mut f: F,
    a: f64,
    first_cut: f64,
    tail_bound: Option<T>,
    cfg: &QuadConfig,
) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
    T: Fn(f64) -> f64,
{
    if !first_cut.is_finite() || first_cut <= a {
        return Err(Error::domain(
            "integrate_to_infinity",
            format!("cut-off {first_cut} must exceed lower limit {a}"),
        ));
    }
    let mut total = integrate(&mut f, a, first_cut, cfg)?;
    let mut cut = first_cut;
    let mut quiet_segments = 0;
    for _ in 0..64 {
        if let Some(bound) = &tail_bound {
            let tail = bound(cut);
            if tail <= cfg.tail_tol {
                total.abs_error += tail;
                return Ok(total);
            }
        } else if quiet_segments >= 2 {
            return Ok(total);
        }
        let next = a + 2.0 * (cut - a);
        let seg = integrate(&mut f, cut, next, cfg)?;
        if seg.value.abs() <= cfg.tail_tol {
            quiet_segments += 1;
        } else {
            quiet_segments = 0;
        }
        total.value += seg.value;
        total.abs_error += seg.abs_error;
        total.evaluations += seg.evaluations;
        total.subintervals += seg.subintervals;
        cut = next;
    }
    Err(Error::Quadrature(Box::new(QuadratureFailure {
        routine: "semi-infinite truncation",
        lower: a,
        upper: cut,
        estimate: total.value,
        abs_error: total.abs_error,
        tolerance: cfg.tail_tol,
        subintervals: total.subintervals,
        evaluations: total.evaluations,
        reason: "tail did not decay below tolerance".to_string(),
    })))
}
