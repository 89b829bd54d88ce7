use crate::atomcore::level::RydbergLevel;
use crate::atomcore::wigner::{wigner3j, wigner6j};

/// ⟨a| C^{k}_{q} |b⟩ for fine-structure levels, where C^k_q = √(4π/(2k+1)) Y_kq
/// acts on the orbital coordinate only.
///
/// Nonzero only when m_j(a) = m_j(b) + q, l_a + k + l_b is even and the
/// triangle rules hold. `q` is an ordinary (not doubled) integer.
pub fn angular_matrix_element(a: &RydbergLevel, b: &RydbergLevel, k: u32, q: i32) -> f64 {
    if a.mj2 != b.mj2 + 2 * q {
        return 0.0;
    }
    let (la, lb, k2) = (2 * a.l as i32, 2 * b.l as i32, 2 * k as i32);
    let parity = wigner3j(la, k2, lb, 0, 0, 0);
    if parity == 0.0 {
        return 0.0;
    }
    let (ja, jb) = (a.j2 as i32, b.j2 as i32);
    let mj = wigner3j(ja, k2, jb, -a.mj2, 2 * q, b.mj2);
    if mj == 0.0 {
        return 0.0;
    }
    let six = wigner6j(la, ja, 1, jb, lb, k2);
    // phase (−1)^{2l + 1/2 + k + j + j' − m}
    let e2 = 2 * la + 1 + k2 + ja + jb - a.mj2;
    debug_assert!(e2 % 2 == 0);
    let phase = if (e2 / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let dims = ((la + 1) * (lb + 1) * (ja + 1) * (jb + 1)) as f64;
    phase * dims.sqrt() * parity * mj * six
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn lvl(n: u32, l: u32, j2: u32, mj2: i32) -> RydbergLevel {
        RydbergLevel::new(n, l, j2, mj2).unwrap()
    }

    /// Explicit spherical harmonics (Condon-Shortley) for l ≤ 3.
    fn ylm(l: i32, m: i32, th: f64, ph: f64) -> Complex64 {
        let (c, s) = (th.cos(), th.sin());
        let e = Complex64::from_polar(1.0, m.abs() as f64 * ph);
        let v = match (l, m.abs()) {
            (0, 0) => 0.5 / PI.sqrt(),
            (1, 0) => (3.0 / (4.0 * PI)).sqrt() * c,
            (1, 1) => -(3.0 / (8.0 * PI)).sqrt() * s,
            (2, 0) => (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0),
            (2, 1) => -(15.0 / (8.0 * PI)).sqrt() * s * c,
            (2, 2) => (15.0 / (32.0 * PI)).sqrt() * s * s,
            (3, 0) => (7.0 / (16.0 * PI)).sqrt() * (5.0 * c * c * c - 3.0 * c),
            (3, 1) => -(21.0 / (64.0 * PI)).sqrt() * s * (5.0 * c * c - 1.0),
            (3, 2) => (105.0 / (32.0 * PI)).sqrt() * s * s * c,
            (3, 3) => -(35.0 / (64.0 * PI)).sqrt() * s * s * s,
            _ => unreachable!(),
        };
        let y = e * v;
        if m < 0 {
            // Y_{l,−m} = (−1)^m Y_{lm}*
            let sign = if m.abs() % 2 == 0 { 1.0 } else { -1.0 };
            y.conj() * sign
        } else {
            y
        }
    }

    /// |l, j=l±1/2, m_j⟩ as spinor components (up, down) in terms of Y_lm.
    fn spinor(l: i32, j2: i32, mj2: i32, th: f64, ph: f64) -> (Complex64, Complex64) {
        let lf = l as f64;
        let m = mj2 as f64 / 2.0;
        let den = 2.0 * lf + 1.0;
        let (cu, cd) = if j2 == 2 * l + 1 {
            (((lf + m + 0.5) / den).sqrt(), ((lf - m + 0.5) / den).sqrt())
        } else {
            (-((lf - m + 0.5) / den).sqrt(), ((lf + m + 0.5) / den).sqrt())
        };
        let mu = (mj2 - 1) / 2;
        let md = (mj2 + 1) / 2;
        let up = if mu.abs() <= l { ylm(l, mu, th, ph) * cu } else { Complex64::new(0.0, 0.0) };
        let dn = if md.abs() <= l { ylm(l, md, th, ph) * cd } else { Complex64::new(0.0, 0.0) };
        (up, dn)
    }

    /// ⟨a|C^k_q|b⟩ by sphere quadrature over decoupled spinor components.
    fn sphere_oracle(a: &RydbergLevel, b: &RydbergLevel, k: i32, q: i32) -> f64 {
        let (gx, gw) = crate::quadrature::gauss_legendre(24);
        let nphi = 32;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in gx.iter().zip(&gw) {
            let th = x.acos();
            for ip in 0..nphi {
                let ph = 2.0 * PI * ip as f64 / nphi as f64;
                let (au, ad) = spinor(a.l as i32, a.j2 as i32, a.mj2, th, ph);
                let (bu, bd) = spinor(b.l as i32, b.j2 as i32, b.mj2, th, ph);
                let c = ylm(k, q, th, ph) * (4.0 * PI / (2 * k + 1) as f64).sqrt();
                acc += (au.conj() * bu + ad.conj() * bd) * c * *w * (2.0 * PI / nphi as f64);
            }
        }
        assert!(acc.im.abs() < 1e-12);
        acc.re
    }

    #[test]
    fn s_to_p_dipole_matches_decoupled_sum() {
        let a = lvl(22, 0, 1, 1);
        let b = lvl(22, 1, 1, 1);
        let v = angular_matrix_element(&a, &b, 1, 0);
        assert!((v - sphere_oracle(&a, &b, 1, 0)).abs() < 1e-12);
        assert!(v.abs() > 0.1);
    }

    #[test]
    fn all_low_l_elements_match_sphere_quadrature() {
        let mut states = Vec::new();
        for l in 0..=3u32 {
            for j2 in [2 * l as i32 - 1, 2 * l as i32 + 1] {
                if j2 < 1 {
                    continue;
                }
                for mj2 in (-j2..=j2).step_by(2) {
                    states.push(lvl(20, l, j2 as u32, mj2));
                }
            }
        }
        for a in &states {
            for b in &states {
                for (k, q) in [(1, 0), (2, 0), (2, 2), (2, -2), (3, 0)] {
                    let v = angular_matrix_element(a, b, k as u32, q);
                    let o = if a.mj2 == b.mj2 + 2 * q { sphere_oracle(a, b, k, q) } else { 0.0 };
                    assert!((v - o).abs() < 1e-12, "{a} {b} k={k} q={q}: {v} vs {o}");
                }
            }
        }
    }

    #[test]
    fn parity_selection() {
        let a = lvl(22, 1, 1, 1);
        let b = lvl(22, 1, 3, 1);
        assert_eq!(angular_matrix_element(&a, &b, 1, 0), 0.0);
        assert_eq!(angular_matrix_element(&lvl(22, 0, 1, 1), &lvl(22, 2, 3, 1), 3, 0), 0.0);
    }

    #[test]
    fn quadrupole_sector_rule() {
        // m_j = 5/2 ← m_j = 1/2 through C^2_{+2}: only |Δl| ≤ 2 with even parity
        for la in 0..8u32 {
            for lb in 0..8u32 {
                for ja in [2 * la + 1, (2 * la).saturating_sub(1)] {
                    for jb in [2 * lb + 1, (2 * lb).saturating_sub(1)] {
                        if ja < 5 || jb == 0 {
                            continue;
                        }
                        let a = lvl(30, la, ja, 5);
                        let b = lvl(30, lb, jb, 1);
                        let v = angular_matrix_element(&a, &b, 2, 2);
                        if la.abs_diff(lb) > 2 || (la + lb) % 2 == 1 {
                            assert_eq!(v, 0.0);
                        }
                    }
                }
            }
        }
        let v = angular_matrix_element(&lvl(30, 2, 5, 5), &lvl(30, 2, 5, 1), 2, 2);
        assert!(v.abs() > 0.0);
    }
}
