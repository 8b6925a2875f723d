//! Element bases on a uniform mesh of `[-h/2, h/2]`.

/// Gauss–Legendre points and weights on `[0, 1]`.
pub fn gauss01(points: usize) -> Vec<(f64, f64)> {
    match points {
        2 => {
            let a = 0.5 / 3f64.sqrt();
            vec![(0.5 - a, 0.5), (0.5 + a, 0.5)]
        }
        3 => {
            let a = 0.5 * (0.6f64).sqrt();
            vec![
                (0.5 - a, 5.0 / 18.0),
                (0.5, 8.0 / 18.0),
                (0.5 + a, 5.0 / 18.0),
            ]
        }
        _ => {
            let (x, w) = crate::field_calc::gauss_legendre(points);
            x.into_iter()
                .zip(w)
                .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
                .collect()
        }
    }
}

/// Values and first and second derivatives (with respect to the local
/// coordinate `t ∈ [0, 1]`) of the basis functions active on one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBasis<const N: usize> {
    pub first: usize,
    pub n: [f64; N],
    pub d1: [f64; N],
    pub d2: [f64; N],
}

/// Continuous piecewise-linear nodal basis.
pub fn p1(element: usize, t: f64) -> LocalBasis<2> {
    LocalBasis {
        first: element,
        n: [1.0 - t, t],
        d1: [-1.0, 1.0],
        d2: [0.0, 0.0],
    }
}

/// C¹ quadratic B-splines on the open uniform knot vector
/// `[0, 0, 0, 1, 2, …, m, m, m]`; there are `m + 2` functions for `m` elements.
pub fn quad_spline(element: usize, elements: usize, t: f64) -> LocalBasis<3> {
    let m = elements as f64;
    let knot = |i: isize| -> f64 { ((i - 2).max(0) as f64).min(m) };
    let s = element as isize + 2;
    let u = element as f64 + t;
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    // Degree-1 functions N_{j,1} for j = s-1, s (only these are nonzero on the span).
    let n1 = |j: isize| -> f64 {
        let left = if j == s {
            ratio(u - knot(j), knot(j + 1) - knot(j))
        } else {
            0.0
        };
        let right = if j + 1 == s {
            ratio(knot(j + 2) - u, knot(j + 2) - knot(j + 1))
        } else {
            0.0
        };
        left + right
    };
    let dn1 = |j: isize| -> f64 {
        let left = if j == s {
            ratio(1.0, knot(j + 1) - knot(j))
        } else {
            0.0
        };
        let right = if j + 1 == s {
            ratio(1.0, knot(j + 2) - knot(j + 1))
        } else {
            0.0
        };
        left - right
    };
    let mut out = LocalBasis {
        first: element,
        n: [0.0; 3],
        d1: [0.0; 3],
        d2: [0.0; 3],
    };
    for (a, j) in (s - 2..=s).enumerate() {
        let dl = knot(j + 2) - knot(j);
        let dr = knot(j + 3) - knot(j + 1);
        out.n[a] = ratio(u - knot(j), dl) * n1(j) + ratio(knot(j + 3) - u, dr) * n1(j + 1);
        out.d1[a] = 2.0 * (ratio(n1(j), dl) - ratio(n1(j + 1), dr));
        out.d2[a] = 2.0 * (ratio(dn1(j), dl) - ratio(dn1(j + 1), dr));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_partition_of_unity_and_reproduction() {
        let m = 5;
        for e in 0..m {
            for &t in &[0.0, 0.3, 0.7, 1.0] {
                let b = quad_spline(e, m, t);
                let s: f64 = b.n.iter().sum();
                assert!((s - 1.0).abs() < 1e-14);
                assert!(b.d1.iter().sum::<f64>().abs() < 1e-14);
                assert!(b.d2.iter().sum::<f64>().abs() < 1e-14);
                // Greville abscissae reproduce the identity: u = Σ g_j N_j.
                let g = |j: usize| -> f64 {
                    let k = |i: isize| ((i - 2).max(0) as f64).min(m as f64);
                    0.5 * (k(j as isize + 1) + k(j as isize + 2))
                };
                let x: f64 = (0..3).map(|a| g(e + a) * b.n[a]).sum();
                let dx: f64 = (0..3).map(|a| g(e + a) * b.d1[a]).sum();
                assert!((x - (e as f64 + t)).abs() < 1e-14);
                assert!((dx - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn spline_end_derivative() {
        let b = quad_spline(0, 4, 0.0);
        assert_eq!(b.n, [1.0, 0.0, 0.0]);
        assert_eq!(b.d1, [-2.0, 2.0, 0.0]);
        let b = quad_spline(3, 4, 1.0);
        assert_eq!(b.n, [0.0, 0.0, 1.0]);
        assert_eq!(b.d1, [0.0, -2.0, 2.0]);
    }

    #[test]
    fn spline_is_c1_across_elements() {
        let m = 6;
        for e in 0..m - 1 {
            let a = quad_spline(e, m, 1.0);
            let b = quad_spline(e + 1, m, 0.0);
            // Shared functions are e+1 and e+2.
            for k in 0..2 {
                assert!((a.n[k + 1] - b.n[k]).abs() < 1e-14);
                assert!((a.d1[k + 1] - b.d1[k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gauss_weights_sum_to_one() {
        for p in 2..6 {
            let s: f64 = gauss01(p).iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }
}
