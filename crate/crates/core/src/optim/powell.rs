//! Powell's conjugate-direction method with a Brent line search.
//!
//! The control flow follows the classic reference implementation: one sweep
//! of line searches along the current direction set, stop when
//! `2 (f_prev - f_cur) <= ftol (|f_prev| + |f_cur|) + 1e-20`, otherwise try to
//! replace the direction of largest decrease by the sweep displacement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowellConfig {
    pub ftol: f64,
    /// Maximum number of full direction sweeps.
    pub max_iter: usize,
    /// Maximum number of objective evaluations; `0` means `1000 * dim`.
    pub max_fev: usize,
    /// Relative tolerance of each line search.
    pub line_tol: f64,
}

impl Default for PowellConfig {
    fn default() -> Self {
        Self { ftol: 1e-3, max_iter: 1000, max_fev: 0, line_tol: 1e-2 }
    }
}

#[derive(Clone, Debug)]
pub struct PowellResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const GOLD: f64 = 1.618034;
const CGOLD: f64 = 0.381_966_0;
const TINY: f64 = 1e-21;
const ZEPS: f64 = 1e-11;
const GROW_LIMIT: f64 = 110.0;
const BRACKET_STEPS: usize = 100;
const BRENT_ITERS: usize = 500;

struct Counted<'a, F> {
    f: &'a mut F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(x.to_vec()))
        }
    }
}

pub fn powell_minimize<F>(mut f: F, x0: &[f64], config: &PowellConfig) -> Result<PowellResult>
where
    F: FnMut(&[f64]) -> f64,
{
    if config.ftol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument(format!("ftol must be positive, got {}", config.ftol)));
    }
    let n = x0.len();
    let mut obj = Counted { f: &mut f, evals: 0 };
    let mut x = x0.to_vec();
    let mut fval = obj.eval(&x)?;
    if n == 0 {
        return Ok(PowellResult { x, f: fval, iterations: 0, evaluations: 1, converged: true });
    }
    let max_fev = if config.max_fev == 0 { 1000 * n } else { config.max_fev };
    let mut direc: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut x1 = x.clone();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let fx = fval;
        let mut bigind = 0;
        let mut delta = 0.0;
        for (i, d) in direc.iter().enumerate() {
            let fx2 = fval;
            let (fnew, xnew, _) = line_search(&mut obj, &x, fval, d, config.line_tol)?;
            fval = fnew;
            x = xnew;
            if fx2 - fval > delta {
                delta = fx2 - fval;
                bigind = i;
            }
        }
        iterations += 1;
        if 2.0 * (fx - fval) <= config.ftol * (fx.abs() + fval.abs()) + 1e-20 {
            converged = true;
            break;
        }
        if obj.evals >= max_fev || iterations >= config.max_iter {
            break;
        }
        let dir: Vec<f64> = x.iter().zip(&x1).map(|(a, b)| a - b).collect();
        let x2: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + d).collect();
        x1.clone_from(&x);
        let fx2 = obj.eval(&x2)?;
        if fx > fx2 {
            let mut t = 2.0 * (fx + fx2 - 2.0 * fval);
            let temp = fx - fval - delta;
            t *= temp * temp;
            let temp = fx - fx2;
            t -= delta * temp * temp;
            if t < 0.0 {
                let (fnew, xnew, step) = line_search(&mut obj, &x, fval, &dir, config.line_tol)?;
                fval = fnew;
                x = xnew;
                if step.iter().any(|&s| s != 0.0) {
                    direc[bigind] = direc[n - 1].clone();
                    direc[n - 1] = step;
                }
            }
        }
    }
    Ok(PowellResult { x, f: fval, iterations, evaluations: obj.evals, converged })
}

/// Minimizes along `d` from `x`. A move is taken only on an improvement above
/// rounding level, so flat directions leave the point unchanged.
fn line_search<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counted<'_, F>,
    x: &[f64],
    fx: f64,
    d: &[f64],
    tol: f64,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let mut buf = x.to_vec();
    let mut phi = |alpha: f64, obj: &mut Counted<'_, F>| -> Result<f64> {
        for ((b, xi), di) in buf.iter_mut().zip(x).zip(d) {
            *b = xi + alpha * di;
        }
        obj.eval(&buf)
    };
    let (alpha, fa) = brent(|a| phi(a, obj), fx, tol)?;
    if fa < fx - 1e-14 * (1.0 + fx.abs()) {
        let step: Vec<f64> = d.iter().map(|di| alpha * di).collect();
        let xn = x.iter().zip(&step).map(|(a, s)| a + s).collect();
        Ok((fa, xn, step))
    } else {
        Ok((fx, x.to_vec(), vec![0.0; x.len()]))
    }
}

/// One-dimensional Brent minimization with automatic bracketing from `[0, 1]`;
/// `f0` is the known value at zero.
pub fn brent<F: FnMut(f64) -> Result<f64>>(mut f: F, f0: f64, tol: f64) -> Result<(f64, f64)> {
    let (xa, xb, xc, fb) = match bracket(&mut f, f0)? {
        Bracket::Found { xa, xb, xc, fb } => (xa, xb, xc, fb),
        Bracket::Exhausted { x, fx } => return Ok((x, fx)),
    };
    let (mut a, mut b) = if xa < xc { (xa, xc) } else { (xc, xa) };
    let (mut x, mut w, mut v) = (xb, xb, xb);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let mut deltax: f64 = 0.0;
    let mut rat: f64 = 0.0;
    for _ in 0..BRENT_ITERS {
        let tol1 = tol * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        let xmid = 0.5 * (a + b);
        if (x - xmid).abs() < tol2 - 0.5 * (b - a) {
            break;
        }
        if deltax.abs() <= tol1 {
            deltax = if x >= xmid { a - x } else { b - x };
            rat = CGOLD * deltax;
        } else {
            let tmp1 = (x - w) * (fx - fv);
            let mut tmp2 = (x - v) * (fx - fw);
            let mut p = (x - v) * tmp2 - (x - w) * tmp1;
            tmp2 = 2.0 * (tmp2 - tmp1);
            if tmp2 > 0.0 {
                p = -p;
            }
            tmp2 = tmp2.abs();
            let dx_temp = deltax;
            deltax = rat;
            if p > tmp2 * (a - x) && p < tmp2 * (b - x) && p.abs() < (0.5 * tmp2 * dx_temp).abs() {
                rat = p / tmp2;
                let u = x + rat;
                if (u - a) < tol2 || (b - u) < tol2 {
                    rat = if xmid - x >= 0.0 { tol1 } else { -tol1 };
                }
            } else {
                deltax = if x >= xmid { a - x } else { b - x };
                rat = CGOLD * deltax;
            }
        }
        let u = if rat.abs() < tol1 {
            if rat >= 0.0 { x + tol1 } else { x - tol1 }
        } else {
            x + rat
        };
        let fu = f(u)?;
        if fu > fx {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        } else {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        }
    }
    Ok((x, fx))
}

enum Bracket {
    Found { xa: f64, xb: f64, xc: f64, fb: f64 },
    /// Expansion cap hit, typically a direction unbounded below: best point seen.
    Exhausted { x: f64, fx: f64 },
}

fn bracket<F: FnMut(f64) -> Result<f64>>(f: &mut F, f0: f64) -> Result<Bracket> {
    let (mut xa, mut xb) = (0.0, 1.0);
    let (mut fa, mut fb) = (f0, f(1.0)?);
    if fa < fb {
        std::mem::swap(&mut xa, &mut xb);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut xc = xb + GOLD * (xb - xa);
    let mut fc = f(xc)?;
    let mut steps = 0;
    while fc < fb {
        if steps >= BRACKET_STEPS {
            return Ok(Bracket::Exhausted { x: xc, fx: fc });
        }
        steps += 1;
        let tmp1 = (xb - xa) * (fb - fc);
        let tmp2 = (xb - xc) * (fb - fa);
        let val = tmp2 - tmp1;
        let denom = if val.abs() < TINY { 2.0 * TINY } else { 2.0 * val };
        let mut w = xb - ((xb - xc) * tmp2 - (xb - xa) * tmp1) / denom;
        let wlim = xb + GROW_LIMIT * (xc - xb);
        let mut fw;
        if (w - xc) * (xb - w) > 0.0 {
            fw = f(w)?;
            if fw < fc {
                return Ok(Bracket::Found { xa: xb, xb: w, xc, fb: fw });
            } else if fw > fb {
                return Ok(Bracket::Found { xa, xb, xc: w, fb });
            }
            w = xc + GOLD * (xc - xb);
            fw = f(w)?;
        } else if (w - wlim) * (wlim - xc) >= 0.0 {
            w = wlim;
            fw = f(w)?;
        } else if (w - wlim) * (xc - w) > 0.0 {
            fw = f(w)?;
            if fw < fc {
                xb = xc;
                xc = w;
                w = xc + GOLD * (xc - xb);
                fb = fc;
                fc = fw;
                fw = f(w)?;
            }
        } else {
            w = xc + GOLD * (xc - xb);
            fw = f(w)?;
        }
        xa = xb;
        xb = xc;
        xc = w;
        fa = fb;
        fb = fc;
        fc = fw;
    }
    Ok(Bracket::Found { xa, xb, xc, fb })
}
