//! Brute-force reference for the window score, written with plain loops and
//! no crate code. Natural logs throughout, converted to bits at the end.
#![allow(clippy::needless_range_loop)]

pub fn brute_force_score(xs: &[usize], ys: &[usize], bins: usize) -> f64 {
    let n = xs.len() as f64;
    let mut px = vec![0.0; bins];
    let mut py = vec![0.0; bins];
    for i in 0..xs.len() {
        px[xs[i]] += 1.0 / n;
        py[ys[i]] += 1.0 / n;
    }
    let mut cx = vec![0.0; bins];
    let mut cy = vec![0.0; bins];
    for k in 0..bins {
        for j in 0..=k {
            cx[k] += px[j];
            cy[k] += py[j];
        }
    }
    let upper = |x: usize, y: usize| if cx[x] < cy[y] { cx[x] } else { cy[y] };
    let lower = |x: usize, y: usize| {
        let v = cx[x] + cy[y] - 1.0;
        if v > 0.0 {
            v
        } else {
            0.0
        }
    };
    let pmf_from = |cdf: &dyn Fn(usize, usize) -> f64| {
        let get = |x: isize, y: isize| {
            if x < 0 || y < 0 {
                0.0
            } else {
                cdf(x as usize, y as usize)
            }
        };
        let mut out = vec![vec![0.0; bins]; bins];
        for x in 0..bins {
            for y in 0..bins {
                let (xi, yi) = (x as isize, y as isize);
                let v = get(xi, yi) - get(xi - 1, yi) - get(xi, yi - 1) + get(xi - 1, yi - 1);
                out[x][y] = if v > 1e-12 { v } else { 0.0 };
            }
        }
        out
    };
    let f_up = pmf_from(&upper);
    let f_lo = pmf_from(&lower);

    let mut cov_up = 0.0;
    let mut cov_lo = 0.0;
    for x in 0..bins {
        for y in 0..bins {
            cov_up += upper(x, y) - cx[x] * cy[y];
            cov_lo += lower(x, y) - cx[x] * cy[y];
        }
    }

    let mx = xs.iter().sum::<usize>() as f64 / n;
    let my = ys.iter().sum::<usize>() as f64 / n;
    let mut vx = 0.0;
    let mut vy = 0.0;
    let mut cxy = 0.0;
    for i in 0..xs.len() {
        let a = xs[i] as f64 - mx;
        let b = ys[i] as f64 - my;
        vx += a * a / n;
        vy += b * b / n;
        cxy += a * b / n;
    }
    let scale = vx.sqrt() * vy.sqrt();

    let mut joint = vec![vec![0.0; bins]; bins];
    for x in 0..bins {
        for y in 0..bins {
            joint[x][y] = px[x] * py[y];
        }
    }
    if scale > 0.0 {
        let rho_up = cov_up / scale;
        let rho_lo = cov_lo / scale;
        let mut rho = cxy / scale;
        if rho > rho_up {
            rho = rho_up;
        }
        if rho < rho_lo {
            rho = rho_lo;
        }
        let (w, f) = if rho > 0.0 {
            (rho / rho_up, &f_up)
        } else if rho < 0.0 {
            (rho / rho_lo, &f_lo)
        } else {
            (0.0, &f_up)
        };
        for x in 0..bins {
            for y in 0..bins {
                joint[x][y] = w * f[x][y] + (1.0 - w) * px[x] * py[y];
            }
        }
    }

    let ln2 = std::f64::consts::LN_2;
    let mut info = 0.0;
    for x in 0..bins {
        for y in 0..bins {
            let p = joint[x][y];
            if p > 0.0 && px[x] * py[y] > 0.0 {
                info += p * (p / (px[x] * py[y])).ln() / ln2;
            }
        }
    }
    let mut h = 0.0;
    for k in 0..bins {
        if px[k] > 0.0 {
            h -= px[k] * px[k].ln() / ln2;
        }
        if py[k] > 0.0 {
            h -= py[k] * py[k].ln() / ln2;
        }
    }
    if h <= 0.0 {
        return 0.0;
    }
    let s = 2.0 * info / h;
    s.clamp(0.0, 1.0)
}
