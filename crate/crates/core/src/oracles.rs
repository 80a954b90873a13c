//! Independent reference computations used to freeze expected values.
//!
//! None of these share a solver with the main path: critical points come from
//! bilinear interpolation of the gradient on a fine grid, minimax values from
//! sublevel-set connectivity, radial orbits from a fixed-step RK4 integration
//! of the planar Hamiltonian equation, and derivative levels from a dense scan.

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::SearchBox;
use crate::field::{pt, PerturbedQuadratic, Point, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCritical {
    pub location: [f64; 2],
    pub value: f64,
    /// Number of grid cells whose bilinear gradient vanishes in this cluster.
    pub cells: usize,
}

/// Roots in `[0, 1]²` of the bilinear interpolants of both gradient components.
fn cell_roots(gx: [f64; 4], gy: [f64; 4]) -> Vec<(f64, f64)> {
    // corners ordered (0,0), (1,0), (0,1), (1,1)
    let coef = |g: [f64; 4]| (g[0], g[1] - g[0], g[2] - g[0], g[0] - g[1] - g[2] + g[3]);
    let (a, b, c, d) = coef(gx);
    let (e, f, g, k) = coef(gy);
    let inside = |t: f64| (-1e-12..=1.0 + 1e-12).contains(&t);
    let mut vs = Vec::new();
    let qa = g * d - k * c;
    let qb = e * d + g * b - f * c - k * a;
    let qc = e * b - f * a;
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if qa.abs() <= 1e-14 * scale {
        if qb != 0.0 {
            vs.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * sq);
            vs.push(q / qa);
            if q != 0.0 {
                vs.push(qc / q);
            }
        }
    }
    let mut out = Vec::new();
    for v in vs.into_iter().filter(|v| inside(*v)) {
        let den_x = b + d * v;
        let den_y = f + k * v;
        let u = if den_x.abs() >= den_y.abs() {
            -(a + c * v) / den_x
        } else {
            -(e + g * v) / den_y
        };
        if u.is_finite() && inside(u) {
            out.push((u.clamp(0.0, 1.0), v.clamp(0.0, 1.0)));
        }
    }
    out
}

/// Critical points of `q_h` in `bx` from an `n × n` cell grid, clustered within two cell diagonals.
pub fn grid_critical_points(h: &PerturbedQuadratic, bx: &SearchBox, n: usize) -> Vec<GridCritical> {
    let (dx, dy) = ((bx.x1 - bx.x0) / n as f64, (bx.y1 - bx.y0) / n as f64);
    let node = |i: usize, j: usize| pt(bx.x0 + i as f64 * dx, bx.y0 + j as f64 * dy);
    let grads: Vec<Vec<Point>> = (0..=n).into_par_iter().map(|j| (0..=n).map(|i| h.grad(node(i, j))).collect()).collect();
    let mut hits: Vec<Point> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let grads = &grads;
            (0..n).flat_map(move |i| {
                let g = [grads[j][i], grads[j][i + 1], grads[j + 1][i], grads[j + 1][i + 1]];
                let same = |f: &dyn Fn(&Point) -> f64| g.iter().all(|p| f(p) > 0.0) || g.iter().all(|p| f(p) < 0.0);
                let roots = if same(&|p| p.x) || same(&|p| p.y) {
                    Vec::new()
                } else {
                    cell_roots(g.map(|p| p.x), g.map(|p| p.y))
                };
                roots.into_iter().map(move |(u, v)| node(i, j) + pt(u * dx, v * dy))
            })
        })
        .collect();
    hits.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let radius = 2.0 * dx.hypot(dy);
    let mut clusters: Vec<(Point, usize)> = Vec::new();
    for p in hits {
        match clusters.iter_mut().find(|(c, m)| (*c / *m as f64 - p).norm() <= radius) {
            Some((c, m)) => {
                *c += p;
                *m += 1;
            }
            None => clusters.push((p, 1)),
        }
    }
    let mut out: Vec<GridCritical> = clusters
        .into_iter()
        .map(|(c, m)| {
            let p = c / m as f64;
            GridCritical { location: [p.x, p.y], value: h.eval(p), cells: m }
        })
        .collect();
    out.sort_by(|a, b| a.location[0].total_cmp(&b.location[0]).then(a.location[1].total_cmp(&b.location[1])));
    out
}

/// Smallest level `c` at which `{q_h ≤ c}` connects the bottom edge of `bx` to
/// its top edge, on an `(n+1) × (n+1)` node grid.
pub fn pass_value(h: &PerturbedQuadratic, bx: &SearchBox, n: usize) -> f64 {
    let m = n + 1;
    let (dx, dy) = ((bx.x1 - bx.x0) / n as f64, (bx.y1 - bx.y0) / n as f64);
    let values: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|idx| h.eval(pt(bx.x0 + (idx % m) as f64 * dx, bx.y0 + (idx / m) as f64 * dy)))
        .collect();
    let mut order: Vec<usize> = (0..m * m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut uf = UnionFind::<usize>::new(m * m);
    let mut active = vec![false; m * m];
    // per root: touches bottom, touches top
    let mut bottom = vec![false; m * m];
    let mut top = vec![false; m * m];
    for idx in order {
        active[idx] = true;
        let (i, j) = (idx % m, idx / m);
        bottom[idx] = j == 0;
        top[idx] = j == n;
        let mut nbrs = Vec::with_capacity(4);
        if i > 0 {
            nbrs.push(idx - 1);
        }
        if i + 1 < m {
            nbrs.push(idx + 1);
        }
        if j > 0 {
            nbrs.push(idx - m);
        }
        if j + 1 < m {
            nbrs.push(idx + m);
        }
        for nb in nbrs.into_iter().filter(|nb| active[*nb]) {
            let (ra, rb) = (uf.find_mut(idx), uf.find_mut(nb));
            if ra != rb {
                let (b, t) = (bottom[ra] || bottom[rb], top[ra] || top[rb]);
                uf.union(ra, rb);
                let r = uf.find_mut(idx);
                bottom[r] = b;
                top[r] = t;
            }
        }
        let r = uf.find_mut(idx);
        if bottom[r] && top[r] {
            return values[idx];
        }
    }
    f64::INFINITY
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitCheck {
    pub s: f64,
    /// Signed number of turns, clockwise positive.
    pub turns: f64,
    /// `|z(1) − z(0)|`.
    pub closure_error: f64,
    /// `∫ H dt − ∮ ½ (x dy − y dx)`.
    pub action: f64,
}

/// Integrates `H(z) = f(π|z|²)` on the circle of area `s` for unit time with
/// `steps` RK4 steps, tracking the action integrals alongside.
pub fn radial_orbit(f: &RadialProfile, s: f64, steps: usize) -> OrbitCheck {
    let pi = std::f64::consts::PI;
    // state: x, y, ∫H, ∫½(x ẏ − y ẋ), unwrapped angle
    let rhs = |z: [f64; 5]| -> [f64; 5] {
        let r2 = z[0] * z[0] + z[1] * z[1];
        let (val, d) = f.eval(pi * r2);
        let w = 2.0 * pi * d;
        let (xd, yd) = (w * z[1], -w * z[0]);
        [xd, yd, val, 0.5 * (z[0] * yd - z[1] * xd), -w]
    };
    let z0 = [(s / pi).sqrt(), 0.0, 0.0, 0.0, 0.0];
    let mut z = z0;
    let h = 1.0 / steps as f64;
    let add = |a: [f64; 5], b: [f64; 5], c: f64| -> [f64; 5] { std::array::from_fn(|i| a[i] + c * b[i]) };
    for _ in 0..steps {
        let k1 = rhs(z);
        let k2 = rhs(add(z, k1, 0.5 * h));
        let k3 = rhs(add(z, k2, 0.5 * h));
        let k4 = rhs(add(z, k3, h));
        z = std::array::from_fn(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    OrbitCheck {
        s,
        turns: -z[4] / (2.0 * pi),
        closure_error: (z[0] - z0[0]).hypot(z[1] - z0[1]),
        action: z[2] + z[3],
    }
}

/// Solutions of `f'(s) = k` in `[0, s_max]` from an `n`-point scan: sign
/// changes refined by bisection, plus touching extrema of `f' − k` below `1e-9`.
pub fn scan_levels(f: &RadialProfile, k: f64, n: usize) -> Vec<f64> {
    let s_max = f.s_max();
    let g = |s: f64| f.eval(s).1 - k;
    let grid: Vec<f64> = (0..=n).map(|j| s_max * j as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&s| g(s)).collect();
    let mut roots = Vec::new();
    for j in 0..n {
        let (a, b) = (vals[j], vals[j + 1]);
        if a == 0.0 {
            roots.push(grid[j]);
        } else if a * b < 0.0 {
            let (mut lo, mut hi) = (grid[j], grid[j + 1]);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if g(lo) * g(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    if vals[n] == 0.0 {
        roots.push(grid[n]);
    }
    // tangencies: interior local extrema of |g| that nearly vanish
    for j in 1..n {
        let (a, b, c) = (vals[j - 1].abs(), vals[j].abs(), vals[j + 1].abs());
        if b <= a && b <= c && b < 1e-6 && vals[j - 1] * vals[j + 1] > 0.0 {
            let (mut lo, mut hi) = (grid[j - 1], grid[j + 1]);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..120 {
                let m1 = hi - phi * (hi - lo);
                let m2 = lo + phi * (hi - lo);
                if g(m1).abs() < g(m2).abs() {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let s = 0.5 * (lo + hi);
            if g(s).abs() < 1e-9 {
                roots.push(s);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-7 * (1.0 + b.abs()));
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Bump;

    #[test]
    fn bilinear_cell_roots() {
        // g = (u − 0.25, v − 0.5) is bilinear already
        let r = cell_roots([-0.25, 0.75, -0.25, 0.75], [-0.5, -0.5, 0.5, 0.5]);
        assert_eq!(r.len(), 1);
        assert!((r[0].0 - 0.25).abs() < 1e-15 && (r[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_quadratic_grid() {
        let pts = grid_critical_points(&PerturbedQuadratic::zero(), &SearchBox::square(1.0), 64);
        assert_eq!(pts.len(), 1);
        assert!(pts[0].location[0].abs() < 1e-12 && pts[0].location[1].abs() < 1e-12);
        assert_eq!(pass_value(&PerturbedQuadratic::zero(), &SearchBox::square(2.0), 64), 0.0);
    }

    #[test]
    fn pass_value_sees_a_raised_saddle() {
        // a gentle positive bump on the origin lifts the pass to its amplitude
        let h = PerturbedQuadratic::new(vec![Bump::new([0.0, 0.0], 0.05, 0.5).unwrap()]).unwrap();
        let v = pass_value(&h, &SearchBox::square(2.0), 400);
        assert!((v - 0.05).abs() < 1e-12, "{v}");
    }

    #[test]
    fn orbit_of_a_linear_profile() {
        // f(s) = s − 2 near s = 1: one full clockwise turn, action f(1) − 1
        let f = RadialProfile::from_hermite(vec![0.0, 2.0], vec![-2.0, 0.0], vec![1.0, 1.0]).unwrap();
        let o = radial_orbit(&f, 1.0, 2000);
        assert!((o.turns - 1.0).abs() < 1e-10);
        assert!(o.closure_error < 1e-10);
        assert!((o.action - (-1.0 - 1.0)).abs() < 1e-10, "{o:?}");
    }

    #[test]
    fn scan_finds_tangency() {
        let f = crate::fixtures::fig1_f();
        let roots = scan_levels(&f, 1.0, 100_000);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0).abs() < 1e-6);
    }
}
