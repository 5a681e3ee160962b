//! Mapping cones, distinguished triangles built from them, and triangle
//! operations.
//!
//! Conventions: `T(V)^k = V^{k+1}` with `d_{T(V)} = -d_V`; the cone of
//! `f: V -> W` is `T(V) (+) W` with differential `[[d_{T(V)}, 0], [T(f), d_W]]`.
//! "Distinguished" is operationalized as: isomorphic to a cone triangle via
//! an isomorphism fixed on the first two objects, found by exact linear
//! solving.

use std::collections::BTreeMap;

use num::Zero;

use crate::complex::Complex;
use crate::error::Error;
use crate::graded::Degree;
use crate::linalg::{rat, Mat, Rat};
use crate::morphism::{mor_vars, ChainMap, GradedMorphism, LinSys};

/// A triangle `X -> Y -> Z -> T(X)`; all three maps are validated chain
/// maps.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub f: ChainMap, // X -> Y
    pub g: ChainMap, // Y -> Z
    pub h: ChainMap, // Z -> T(X)
}

impl Triangle {
    pub fn new(f: ChainMap, g: ChainMap, h: ChainMap) -> Result<Self, Error> {
        if f.target != g.source {
            return Err(Error::structural("triangle: f and g do not compose"));
        }
        if g.target != h.source {
            return Err(Error::structural("triangle: g and h do not compose"));
        }
        if h.target != f.source.shift(1) {
            return Err(Error::structural("triangle: h must land in T(X)"));
        }
        Ok(Triangle { f, g, h })
    }

    pub fn x(&self) -> &Complex {
        &self.f.source
    }

    pub fn y(&self) -> &Complex {
        &self.f.target
    }

    pub fn z(&self) -> &Complex {
        &self.g.target
    }
}

/// The mapping cone of a chain map, together with its triangle
/// `V -> W -> C_f -> T(V)`.
pub fn cone(f: &ChainMap) -> Result<(Complex, Triangle), Error> {
    let tv = f.source.shift(1);
    let w = &f.target;
    let space = tv.space().direct_sum(w.space())?;
    let mut d = BTreeMap::new();
    let degs: std::collections::BTreeSet<Degree> = space.support().collect();
    for &k in &degs {
        let a = tv.d_at(k);
        let dw = w.d_at(k);
        // T(f)^k: T(V)^k = V^{k+1} -> W^{k+1}.
        let tf = f.mat_at(k + 1);
        let zero = Mat::zeros(a.rows(), dw.cols());
        let m = Mat::block(&a, &zero, &tf, &dw)?;
        if m.rows() > 0 && m.cols() > 0 {
            d.insert(k, m);
        }
    }
    let c = Complex::new(space, d)?;

    // i2: W -> C_f, w |-> (0, w).
    let mut i2 = BTreeMap::new();
    for k in w.space().support() {
        let rows = c.dim(k);
        let cols = w.dim(k);
        let top = tv.dim(k);
        i2.insert(
            k,
            Mat::from_fn(rows, cols, |i, j| if i == top + j { rat(1) } else { Rat::zero() }),
        );
    }
    let g = ChainMap::from_mats(w.clone(), c.clone(), i2)?;

    // p1: C_f -> T(V), (v, w) |-> v.
    let mut p1 = BTreeMap::new();
    for k in c.space().support() {
        let rows = tv.dim(k);
        let cols = c.dim(k);
        p1.insert(k, Mat::from_fn(rows, cols, |i, j| if i == j { rat(1) } else { Rat::zero() }));
    }
    let h = ChainMap::from_mats(c.clone(), tv.clone(), p1)?;

    let triangle = Triangle::new(f.clone(), g, h)?;
    Ok((c, triangle))
}

/// Rotation `Y -> Z -> T(X) -> T(Y)` with the standard sign on the third
/// map.
pub fn rotate(t: &Triangle) -> Result<Triangle, Error> {
    let tf = shift_chain_map(&t.f, 1)?;
    let neg_tf = ChainMap::new(tf.source.clone(), tf.target.clone(), tf.morphism().neg())?;
    Triangle::new(t.g.clone(), t.h.clone(), neg_tf)
}

/// Reindexes a chain map along `T^n`.
pub fn shift_chain_map(f: &ChainMap, n: i64) -> Result<ChainMap, Error> {
    ChainMap::new(f.source.shift(n), f.target.shift(n), f.morphism().shift(n))
}

/// Block-diagonal direct sum of chain maps.
pub fn direct_sum_maps(a: &ChainMap, b: &ChainMap) -> Result<ChainMap, Error> {
    let source = a.source.direct_sum(&b.source)?;
    let target = a.target.direct_sum(&b.target)?;
    let mut mats = BTreeMap::new();
    for k in source.space().support() {
        let ma = a.mat_at(k);
        let mb = b.mat_at(k);
        let z1 = Mat::zeros(ma.rows(), mb.cols());
        let z2 = Mat::zeros(mb.rows(), ma.cols());
        mats.insert(k, Mat::block(&ma, &z1, &z2, &mb)?);
    }
    ChainMap::from_mats(source, target, mats)
}

/// Componentwise direct sum of triangles.
pub fn direct_sum(t1: &Triangle, t2: &Triangle) -> Result<Triangle, Error> {
    let f = direct_sum_maps(&t1.f, &t2.f)?;
    let g = direct_sum_maps(&t1.g, &t2.g)?;
    let h = direct_sum_maps(&t1.h, &t2.h)?;
    // h lands in T(X1) (+) T(X2) = T(X1 (+) X2) on the nose.
    Triangle::new(f, g, h)
}

/// Searches for an isomorphism `u: t.z -> cone(t.f)` which is fixed on X
/// and Y, i.e. a chain isomorphism with `u . g = i2` and `p1 . u = h`.
/// Returns the witness if found.
pub fn distinguishing_iso(t: &Triangle) -> Result<Option<ChainMap>, Error> {
    let (c, ct) = cone(&t.f)?;
    let z = t.z();
    let vars = mor_vars(z.space(), c.space(), 0);
    let mut sys = LinSys::new(vars.total);

    // Chain map: d_C u - u d_Z = 0.
    for k in z.space().support() {
        let rows = c.dim(k + 1);
        let cols = z.dim(k);
        if cols == 0 {
            continue;
        }
        let dc = c.d_at(k);
        let dz = z.d_at(k);
        for i in 0..rows {
            for j in 0..cols {
                let mut row = Vec::new();
                for tcol in 0..dc.cols() {
                    if !dc.at(i, tcol).is_zero() {
                        if let Some(v) = vars.var(k, tcol, j) {
                            row.push((v, dc.at(i, tcol).clone()));
                        }
                    }
                }
                for s in 0..dz.rows() {
                    if !dz.at(s, j).is_zero() {
                        if let Some(v) = vars.var(k + 1, i, s) {
                            row.push((v, -dz.at(s, j)));
                        }
                    }
                }
                sys.push_row(row, Rat::zero());
            }
        }
    }
    // u . g = i2 (fix Y).
    for k in t.y().space().support() {
        let gk = t.g.mat_at(k);
        let i2k = ct.g.mat_at(k);
        for i in 0..i2k.rows() {
            for j in 0..i2k.cols() {
                let mut row = Vec::new();
                for s in 0..gk.rows() {
                    if !gk.at(s, j).is_zero() {
                        if let Some(v) = vars.var(k, i, s) {
                            row.push((v, gk.at(s, j).clone()));
                        }
                    }
                }
                sys.push_row(row, i2k.at(i, j).clone());
            }
        }
    }
    // p1 . u = h (fix X).
    for k in z.space().support() {
        let p1k = ct.h.mat_at(k);
        let hk = t.h.mat_at(k);
        for i in 0..hk.rows() {
            for j in 0..hk.cols() {
                let mut row = Vec::new();
                for s in 0..p1k.cols() {
                    if !p1k.at(i, s).is_zero() {
                        if let Some(v) = vars.var(k, s, j) {
                            row.push((v, p1k.at(i, s).clone()));
                        }
                    }
                }
                sys.push_row(row, hk.at(i, j).clone());
            }
        }
    }

    let Some(particular) = sys.solve() else { return Ok(None) };
    let kernel = sys.kernel_basis();
    let build = |coeffs: &[Rat]| -> GradedMorphism {
        let mut vals = particular.clone();
        for (b, c) in kernel.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            for (v, kv) in vals.iter_mut().zip(b) {
                *v += kv * c;
            }
        }
        vars.to_morphism(0, z.space(), c.space(), &vals)
    };
    let invertible = |u: &GradedMorphism| -> bool {
        z.space().support().chain(c.space().support()).all(|k| {
            let m = u.mat_at(k);
            m.rows() == m.cols() && m.inverse().is_some()
        })
    };
    // Deterministic search through the affine solution space.
    let mut candidates: Vec<Vec<Rat>> = vec![vec![Rat::zero(); kernel.len()]];
    for i in 0..kernel.len() {
        let mut plus = vec![Rat::zero(); kernel.len()];
        plus[i] = rat(1);
        candidates.push(plus.clone());
        plus[i] = rat(-1);
        candidates.push(plus);
    }
    let mut state: u64 = 0x9e3779b97f4a7c15;
    for _ in 0..40 {
        let mut c = Vec::with_capacity(kernel.len());
        for _ in 0..kernel.len() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            c.push(rat(((state >> 33) % 11) as i64 - 5));
        }
        candidates.push(c);
    }
    for coeffs in candidates {
        let u = build(&coeffs);
        if invertible(&u) {
            let u = ChainMap::new(z.clone(), c.clone(), u)?;
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// True when the triangle is isomorphic to the cone triangle of its first
/// map, fixing X and Y.
pub fn is_distinguished(t: &Triangle) -> Result<bool, Error> {
    Ok(distinguishing_iso(t)?.is_some())
}

/// Checks that the direct sum of two cone triangles is (still) a cone
/// triangle of the direct-sum map.
pub fn check_sum_distinguished(t1: &Triangle, t2: &Triangle) -> Result<bool, Error> {
    let sum = direct_sum(t1, t2)?;
    is_distinguished(&sum)
}

/// Searches for an isomorphism of triangles `(u1, u2, u3): t1 -> t2`; all
/// three components simultaneously invertible chain maps making the three
/// squares commute.
pub fn triangles_isomorphic(t1: &Triangle, t2: &Triangle) -> Result<bool, Error> {
    let vx = mor_vars(t1.x().space(), t2.x().space(), 0);
    let vy = mor_vars(t1.y().space(), t2.y().space(), 0);
    let vz = mor_vars(t1.z().space(), t2.z().space(), 0);
    let off_y = vx.total;
    let off_z = vx.total + vy.total;
    let mut sys = LinSys::new(vx.total + vy.total + vz.total);

    // Chain-map conditions for each component.
    let chain_rows = |c_src: &Complex,
                          c_tgt: &Complex,
                          vars: &crate::morphism::MorVars,
                          off: usize,
                          sys: &mut LinSys| {
        for k in c_src.space().support() {
            let rows = c_tgt.dim(k + 1);
            let cols = c_src.dim(k);
            if cols == 0 {
                continue;
            }
            let dt = c_tgt.d_at(k);
            let ds = c_src.d_at(k);
            for i in 0..rows {
                for j in 0..cols {
                    let mut row = Vec::new();
                    for t in 0..dt.cols() {
                        if !dt.at(i, t).is_zero() {
                            if let Some(v) = vars.var(k, t, j) {
                                row.push((off + v, dt.at(i, t).clone()));
                            }
                        }
                    }
                    for s in 0..ds.rows() {
                        if !ds.at(s, j).is_zero() {
                            if let Some(v) = vars.var(k + 1, i, s) {
                                row.push((off + v, -ds.at(s, j)));
                            }
                        }
                    }
                    sys.push_row(row, Rat::zero());
                }
            }
        }
    };
    chain_rows(t1.x(), t2.x(), &vx, 0, &mut sys);
    chain_rows(t1.y(), t2.y(), &vy, off_y, &mut sys);
    chain_rows(t1.z(), t2.z(), &vz, off_z, &mut sys);

    // Commuting squares: u2 f1 = f2 u1; u3 g1 = g2 u2; T(u1) h1 = h2 u3.
    // The condition is u_B . a = b . u_A for a: A1 -> B1 in t1 and
    // b: A2 -> B2 in t2; `shift_b` indexes u_B's blocks with an offset so
    // that T(u1) can reuse u1's variables (block k of T(u1) is block k+1
    // of u1).
    let square = |a: &ChainMap,
                  b: &ChainMap,
                  va: &crate::morphism::MorVars, // vars for u_A: A1 -> A2
                  off_a: usize,
                  vb: &crate::morphism::MorVars, // vars for u_B: B1 -> B2
                  off_b: usize,
                  shift_b: i64,
                  sys: &mut LinSys| {
        for k in a.source.space().support() {
            let rows = b.target.dim(k);
            let cols = a.source.dim(k);
            if cols == 0 {
                continue;
            }
            let a_k = a.mat_at(k);
            let b_k = b.mat_at(k);
            for i in 0..rows {
                for j in 0..cols {
                    let mut row = Vec::new();
                    // (u_B . a)_{ij}
                    for s in 0..a_k.rows() {
                        if !a_k.at(s, j).is_zero() {
                            if let Some(v) = vb.var(k + shift_b, i, s) {
                                row.push((off_b + v, a_k.at(s, j).clone()));
                            }
                        }
                    }
                    // -(b . u_A)_{ij}
                    for t in 0..b_k.cols() {
                        if !b_k.at(i, t).is_zero() {
                            if let Some(v) = va.var(k, t, j) {
                                row.push((off_a + v, -b_k.at(i, t)));
                            }
                        }
                    }
                    sys.push_row(row, Rat::zero());
                }
            }
        }
    };
    square(&t1.f, &t2.f, &vx, 0, &vy, off_y, 0, &mut sys);
    square(&t1.g, &t2.g, &vy, off_y, &vz, off_z, 0, &mut sys);
    square(&t1.h, &t2.h, &vz, off_z, &vx, 0, 1, &mut sys);

    let kernel = sys.kernel_basis();
    if kernel.is_empty() {
        return Ok(false);
    }
    let square_dims_match = |a: &Complex, b: &Complex| {
        a.space().support().chain(b.space().support()).all(|k| a.dim(k) == b.dim(k))
    };
    if !square_dims_match(t1.x(), t2.x())
        || !square_dims_match(t1.y(), t2.y())
        || !square_dims_match(t1.z(), t2.z())
    {
        return Ok(false);
    }
    let invertible = |vals: &[Rat]| -> bool {
        let u1 = vx.to_morphism(0, t1.x().space(), t2.x().space(), &vals[..off_y]);
        let u2 = vy.to_morphism(0, t1.y().space(), t2.y().space(), &vals[off_y..off_z]);
        let u3 = vz.to_morphism(0, t1.z().space(), t2.z().space(), &vals[off_z..]);
        let inv = |u: &GradedMorphism, src: &Complex| {
            src.space().support().all(|k| u.mat_at(k).inverse().is_some())
        };
        inv(&u1, t1.x()) && inv(&u2, t1.y()) && inv(&u3, t1.z())
    };
    // Deterministic sampling of the kernel space.
    let mut state: u64 = 0x2545f4914f6cdd1d;
    for trial in 0..80usize {
        let mut vals = vec![Rat::zero(); sys_total(&vx, &vy, &vz)];
        if trial < kernel.len() {
            vals.clone_from(&kernel[trial]);
        } else {
            for b in &kernel {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let c = rat(((state >> 33) % 9) as i64 - 4);
                if c.is_zero() {
                    continue;
                }
                for (v, kv) in vals.iter_mut().zip(b) {
                    *v += kv * &c;
                }
            }
        }
        if invertible(&vals) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn sys_total(
    vx: &crate::morphism::MorVars,
    vy: &crate::morphism::MorVars,
    vz: &crate::morphism::MorVars,
) -> usize {
    vx.total + vy.total + vz.total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::graded::GradedSpace;
    use crate::morphism::is_quasi_iso;

    fn interval(at: Degree) -> Complex {
        let space = GradedSpace::from_dims(&[(at, 1), (at + 1, 1)]);
        let mut d = BTreeMap::new();
        d.insert(at, Mat::from_rows(vec![vec![rat(1)]]).unwrap());
        Complex::new(space, d).unwrap()
    }

    fn line(at: Degree) -> Complex {
        Complex::new(GradedSpace::from_dims(&[(at, 1)]), BTreeMap::new()).unwrap()
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        for c in [interval(0), line(0), interval(-2)] {
            let (cone_c, _) = cone(&ChainMap::identity(&c)).unwrap();
            assert!(cone_c.is_acyclic());
        }
    }

    #[test]
    fn cone_of_zero_is_shift_plus_target() {
        let x = line(0);
        let y = line(0);
        let f = ChainMap::zero(&x, &y);
        let (c, t) = cone(&f).unwrap();
        assert_eq!(c.dim(-1), 1);
        assert_eq!(c.dim(0), 1);
        assert!(is_distinguished(&t).unwrap());
    }

    #[test]
    fn cone_acyclic_iff_quasi_iso() {
        // A quasi-isomorphism: interval -> 0.
        let c = interval(0);
        let zero = Complex::zero();
        let f = ChainMap::zero(&c, &zero);
        assert!(is_quasi_iso(&f).is_quasi_iso);
        let (cf, _) = cone(&f).unwrap();
        assert!(cf.is_acyclic());

        // Not a quasi-isomorphism: 0 -> line.
        let g = ChainMap::zero(&zero, &line(0));
        assert!(!is_quasi_iso(&g).is_quasi_iso);
        let (cg, _) = cone(&g).unwrap();
        assert!(!cg.is_acyclic());
    }

    #[test]
    fn rotate_three_times_is_shift() {
        let c = interval(0);
        let (_, t) = cone(&ChainMap::identity(&c)).unwrap();
        let r3 = rotate(&rotate(&rotate(&t).unwrap()).unwrap()).unwrap();
        let shifted = Triangle::new(
            shift_chain_map(&t.f, 1).unwrap(),
            shift_chain_map(&t.g, 1).unwrap(),
            shift_chain_map(&t.h, 1).unwrap(),
        )
        .unwrap();
        assert!(triangles_isomorphic(&r3, &shifted).unwrap());
    }

    #[test]
    fn sum_of_cone_triangles_is_distinguished() {
        let f1 = ChainMap::identity(&interval(0));
        let f2 = ChainMap::zero(&line(1), &line(1));
        let (_, t1) = cone(&f1).unwrap();
        let (_, t2) = cone(&f2).unwrap();
        assert!(check_sum_distinguished(&t1, &t2).unwrap());
    }

    #[test]
    fn zero_map_triangle_with_explicit_sum_passes() {
        // X -> 0 -> Y with Z = T(X) (+) Y.
        let x = line(0);
        let y = interval(3);
        let f = ChainMap::zero(&x, &y);
        let tx = x.shift(1);
        let z = tx.direct_sum(&y).unwrap();
        let mut g_mats = BTreeMap::new();
        for k in y.space().support() {
            let rows = z.dim(k);
            let cols = y.dim(k);
            let top = tx.dim(k);
            g_mats.insert(
                k,
                Mat::from_fn(rows, cols, |i, j| if i == top + j { rat(1) } else { Rat::zero() }),
            );
        }
        let g = ChainMap::from_mats(y.clone(), z.clone(), g_mats).unwrap();
        let mut h_mats = BTreeMap::new();
        for k in z.space().support() {
            let rows = tx.dim(k);
            let cols = z.dim(k);
            h_mats.insert(k, Mat::from_fn(rows, cols, |i, j| if i == j { rat(1) } else { Rat::zero() }));
        }
        let h = ChainMap::from_mats(z.clone(), tx.clone(), h_mats).unwrap();
        let t = Triangle::new(f, g, h).unwrap();
        assert!(is_distinguished(&t).unwrap());
    }
}
