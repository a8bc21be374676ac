//! Single steps of the DOP853 embedded pair and its continuous extension.

use super::tableau::*;
use crate::geometry::{accelerations_unchecked, PotentialSpec, Vec2, PHASE_DIM};

pub(crate) type Phase = [f64; PHASE_DIM];

/// Right-hand side of the equations of motion: `q' = p`, `p' = a(q)`.
#[inline]
pub(crate) fn rhs(spec: &PotentialSpec, y: &Phase) -> Phase {
    let q = [Vec2::new(y[0], y[1]), Vec2::new(y[2], y[3]), Vec2::new(y[4], y[5])];
    let a = accelerations_unchecked(&q, spec);
    [
        y[6], y[7], y[8], y[9], y[10], y[11], a[0].x, a[0].y, a[1].x, a[1].y, a[2].x, a[2].y,
    ]
}

#[inline]
fn combo(y: &Phase, h: f64, terms: &[(f64, &Phase)]) -> Phase {
    let mut out = *y;
    for (c, k) in terms {
        let ch = c * h;
        for i in 0..PHASE_DIM {
            out[i] += ch * k[i];
        }
    }
    out
}

/// Interpolation data for one accepted step.
#[derive(Debug, Clone)]
pub(crate) struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    pub h: f64,
    pub y0: Phase,
    pub y1: Phase,
    cont: [Phase; 8],
}

impl DenseStep {
    /// State at `t0 + s h`, `s` in `[0, 1]`. Endpoints return the stored
    /// states bit for bit.
    pub fn eval_fraction(&self, s: f64) -> Phase {
        if s == 0.0 {
            return self.y0;
        }
        if s == 1.0 {
            return self.y1;
        }
        let s1 = 1.0 - s;
        let c = &self.cont;
        let mut out = [0.0; PHASE_DIM];
        for i in 0..PHASE_DIM {
            let conpar = c[4][i] + s * (c[5][i] + s1 * (c[6][i] + s * c[7][i]));
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * conpar)));
        }
        out
    }
}

/// Everything one attempted step produces.
pub(crate) struct Attempt {
    pub y_new: Phase,
    /// Scaled error norm; `<= 1` means acceptable.
    pub err: f64,
    k1: Phase,
    k2: Phase,
    k3: Phase,
    k6: Phase,
    k7: Phase,
    k8: Phase,
    k9: Phase,
    k10: Phase,
}

/// One DOP853 step of size `h` from `(t, y)` with `k1 = f(y)`.
pub(crate) fn attempt(spec: &PotentialSpec, y: &Phase, k1: &Phase, h: f64, rtol: f64, atol: f64) -> Attempt {
    let k2 = rhs(spec, &combo(y, h, &[(A21, k1)]));
    let k3 = rhs(spec, &combo(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = rhs(spec, &combo(y, h, &[(A41, k1), (A43, &k3)]));
    let k5 = rhs(spec, &combo(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]));
    let k6 = rhs(spec, &combo(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]));
    let k7 = rhs(spec, &combo(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]));
    let k8 = rhs(spec, &combo(y, h, &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]));
    let k9 = rhs(
        spec,
        &combo(y, h, &[(A91, k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]),
    );
    let k10 = rhs(
        spec,
        &combo(
            y,
            h,
            &[(A101, k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
        ),
    );
    let k11 = rhs(
        spec,
        &combo(
            y,
            h,
            &[
                (A111, k1),
                (A114, &k4),
                (A115, &k5),
                (A116, &k6),
                (A117, &k7),
                (A118, &k8),
                (A119, &k9),
                (A1110, &k10),
            ],
        ),
    );
    let y12 = combo(
        y,
        h,
        &[
            (A121, k1),
            (A124, &k4),
            (A125, &k5),
            (A126, &k6),
            (A127, &k7),
            (A128, &k8),
            (A129, &k9),
            (A1210, &k10),
            (A1211, &k11),
        ],
    );
    let k12 = rhs(spec, &y12);

    let mut y_new = [0.0; PHASE_DIM];
    let mut err = 0.0;
    let mut err2 = 0.0;
    for i in 0..PHASE_DIM {
        let incr = B1 * k1[i]
            + B6 * k6[i]
            + B7 * k7[i]
            + B8 * k8[i]
            + B9 * k9[i]
            + B10 * k10[i]
            + B11 * k11[i]
            + B12 * k12[i];
        y_new[i] = y[i] + h * incr;
        let sk = atol + rtol * y[i].abs().max(y_new[i].abs());
        let e3 = incr - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
        let e5 = ER1 * k1[i]
            + ER6 * k6[i]
            + ER7 * k7[i]
            + ER8 * k8[i]
            + ER9 * k9[i]
            + ER10 * k10[i]
            + ER11 * k11[i]
            + ER12 * k12[i];
        err2 += (e3 / sk).powi(2);
        err += (e5 / sk).powi(2);
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    let mut err = h.abs() * err * (1.0 / (deno * PHASE_DIM as f64)).sqrt();
    if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
        err = f64::INFINITY;
    }

    Attempt { y_new, err, k1: *k1, k2: k11, k3: k12, k6, k7, k8, k9, k10 }
}

/// Builds the continuous extension of an accepted attempt; `k_new` is
/// `f(y_new)`. Costs three extra right-hand-side evaluations.
pub(crate) fn dense(spec: &PotentialSpec, t0: f64, h: f64, y: &Phase, at: &Attempt, k_new: &Phase) -> DenseStep {
    let Attempt { y_new, k1, k2, k3, k6, k7, k8, k9, k10, .. } = at;
    let k4 = k_new;
    let mut cont = [[0.0; PHASE_DIM]; 8];
    for i in 0..PHASE_DIM {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k4[i] - bspl;
        cont[4][i] = D41 * k1[i] + D46 * k6[i] + D47 * k7[i] + D48 * k8[i] + D49 * k9[i] + D410 * k10[i] + D411 * k2[i] + D412 * k3[i];
        cont[5][i] = D51 * k1[i] + D56 * k6[i] + D57 * k7[i] + D58 * k8[i] + D59 * k9[i] + D510 * k10[i] + D511 * k2[i] + D512 * k3[i];
        cont[6][i] = D61 * k1[i] + D66 * k6[i] + D67 * k7[i] + D68 * k8[i] + D69 * k9[i] + D610 * k10[i] + D611 * k2[i] + D612 * k3[i];
        cont[7][i] = D71 * k1[i] + D76 * k6[i] + D77 * k7[i] + D78 * k8[i] + D79 * k9[i] + D710 * k10[i] + D711 * k2[i] + D712 * k3[i];
    }
    let k14 = rhs(
        spec,
        &combo(
            y,
            h,
            &[(A141, k1), (A147, k7), (A148, k8), (A149, k9), (A1410, k10), (A1411, k2), (A1412, k3), (A1413, k4)],
        ),
    );
    let k15 = rhs(
        spec,
        &combo(
            y,
            h,
            &[(A151, k1), (A156, k6), (A157, k7), (A158, k8), (A1511, k2), (A1512, k3), (A1513, k4), (A1514, &k14)],
        ),
    );
    let k16 = rhs(
        spec,
        &combo(
            y,
            h,
            &[(A161, k1), (A166, k6), (A167, k7), (A168, k8), (A169, k9), (A1613, k4), (A1614, &k14), (A1615, &k15)],
        ),
    );
    for i in 0..PHASE_DIM {
        cont[4][i] = h * (cont[4][i] + D413 * k4[i] + D414 * k14[i] + D415 * k15[i] + D416 * k16[i]);
        cont[5][i] = h * (cont[5][i] + D513 * k4[i] + D514 * k14[i] + D515 * k15[i] + D516 * k16[i]);
        cont[6][i] = h * (cont[6][i] + D613 * k4[i] + D614 * k14[i] + D615 * k15[i] + D616 * k16[i]);
        cont[7][i] = h * (cont[7][i] + D713 * k4[i] + D714 * k14[i] + D715 * k15[i] + D716 * k16[i]);
    }
    DenseStep { t0, t1: t0 + h, h, y0: *y, y1: *y_new, cont }
}
