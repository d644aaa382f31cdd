//! CSV tables. Every number is written with [`g17`]; escaped coordinates
//! appear as `inf`.

use std::io::{self, Write};

use realshadow_core::entropy::TableRow;
use realshadow_core::measure::ShadowSample;
use realshadow_core::mirrors::MirrorSet;
use realshadow_core::orbits::{OrbitRecord, ShadowPoint};
use realshadow_core::potential::RayPoint;
use realshadow_core::{Complex, Error};

use crate::format::g17;

/// Columns `n,re,im`.
pub fn write_orbit(w: &mut impl Write, orbit: &OrbitRecord) -> io::Result<()> {
    writeln!(w, "n,re,im")?;
    for (n, z) in orbit.points.iter().enumerate() {
        writeln!(w, "{n},{},{}", g17(z.re), g17(z.im))?;
    }
    Ok(())
}

/// A comment line `# N=…,witness=re,im` followed by columns `j,x_j`.
pub fn write_shadow(w: &mut impl Write, s: &ShadowPoint) -> io::Result<()> {
    writeln!(w, "# N={},witness={},{}", s.depth(), g17(s.witness.re), g17(s.witness.im))?;
    writeln!(w, "j,x_j")?;
    for (j, x) in s.xs.iter().enumerate() {
        writeln!(w, "{j},{}", g17(*x))?;
    }
    Ok(())
}

/// Columns `theta,potential,re,im`.
pub fn write_ray(w: &mut impl Write, ray: &[RayPoint]) -> io::Result<()> {
    writeln!(w, "theta,potential,re,im")?;
    for p in ray {
        writeln!(w, "{},{},{},{}", g17(p.theta), g17(p.potential), g17(p.z.re), g17(p.z.im))?;
    }
    Ok(())
}

/// Columns `idx,re,im`.
pub fn write_sample(w: &mut impl Write, points: &[Complex]) -> io::Result<()> {
    writeln!(w, "idx,re,im")?;
    for (i, z) in points.iter().enumerate() {
        writeln!(w, "{i},{},{}", g17(z.re), g17(z.im))?;
    }
    Ok(())
}

/// Columns `idx,x_0,…,x_N`.
pub fn write_shadow_sample(w: &mut impl Write, s: &ShadowSample) -> io::Result<()> {
    let header: Vec<String> = (0..=s.depth).map(|j| format!("x_{j}")).collect();
    writeln!(w, "idx,{}", header.join(","))?;
    for (i, v) in s.shadows.iter().enumerate() {
        let row: Vec<String> = v.xs.iter().map(|x| g17(*x)).collect();
        writeln!(w, "{i},{}", row.join(","))?;
    }
    Ok(())
}

/// One row per mirror of each base point on a sweep, columns
/// `idx,base_re,base_im,mirror_re,mirror_im,status`. Status is `ok`,
/// `none` (no mirrors; mirror columns empty) or `invariant-line` /
/// `error`.
pub fn write_mirror_curve(w: &mut impl Write, sweep: &[(Complex, Result<MirrorSet, Error>)]) -> io::Result<()> {
    writeln!(w, "idx,base_re,base_im,mirror_re,mirror_im,status")?;
    for (i, (base, result)) in sweep.iter().enumerate() {
        let (re, im) = (g17(base.re), g17(base.im));
        match result {
            Ok(m) if m.mirrors.is_empty() => writeln!(w, "{i},{re},{im},,,none")?,
            Ok(m) => {
                for v in &m.mirrors {
                    writeln!(w, "{i},{re},{im},{},{},ok", g17(v.re), g17(v.im))?;
                }
            }
            Err(Error::InvariantLine) => writeln!(w, "{i},{re},{im},,,invariant-line")?,
            Err(_) => writeln!(w, "{i},{re},{im},,,error")?,
        }
    }
    Ok(())
}

/// Columns `n,eps,statistic`.
pub fn write_entropy_table(w: &mut impl Write, table: &[TableRow]) -> io::Result<()> {
    writeln!(w, "n,eps,statistic")?;
    for r in table {
        writeln!(w, "{},{},{}", r.n, g17(r.eps), g17(r.statistic))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use realshadow_core::orbits::{iterate, shadow};
    use realshadow_core::Polynomial;

    fn text(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> String {
        let mut out = Vec::new();
        f(&mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn orbit_and_shadow_tables() {
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let o = iterate(&sq, Complex::new(2.0, 0.0), 5, 4.0).unwrap();
        assert_eq!(text(|w| write_orbit(w, &o)), "n,re,im\n0,2,0\n1,4,0\n2,16,0\n");
        let s = shadow(&sq, Complex::new(0.0, 1.0), 3).unwrap();
        assert_eq!(text(|w| write_shadow(w, &s)), "# N=3,witness=0,1\nj,x_j\n0,0\n1,-1\n2,1\n3,1\n");
    }

    #[test]
    fn mirror_curve_rows() {
        let m = MirrorSet {
            base: Complex::new(1.0, 1.0),
            mirrors: vec![Complex::new(1.0, -1.0)],
            depth_verified: 4,
            tol: 1e-9,
        };
        let empty = MirrorSet { mirrors: Vec::new(), ..m.clone() };
        let rows = [(m.base, Ok(m)), (Complex::new(0.5, 0.0), Ok(empty)), (Complex::new(0.0, 2.0), Err(Error::InvariantLine))];
        let t = text(|w| write_mirror_curve(w, &rows));
        assert_eq!(t.lines().nth(1), Some("0,1,1,1,-1,ok"));
        assert_eq!(t.lines().nth(2), Some("1,0.5,0,,,none"));
        assert_eq!(t.lines().nth(3), Some("2,0,2,,,invariant-line"));
    }
}
