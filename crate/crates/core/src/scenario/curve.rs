use std::io::Write;

use crate::aqm::SoftTargetCurve;
use crate::Probability;

pub const CURVE_COLUMNS: [&str; 4] = ["p_prime", "target_from_pprime_s", "p", "target_from_p_s"];

/// Row `i` of the two target-curve panels on a uniform grid over `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub p_prime: f64,
    pub target_from_pprime: f64,
    pub p: f64,
    pub target_from_p: f64,
}

/// Both panels sampled at `grid` evenly spaced points, endpoints included.
/// Returns `None` when `grid < 2`.
pub fn target_curve(curve: &SoftTargetCurve, grid: usize) -> Option<Vec<CurveRow>> {
    if grid < 2 {
        return None;
    }
    let last = (grid - 1) as f64;
    Some(
        (0..grid)
            .map(|i| {
                let x = Probability::clamped(i as f64 / last);
                CurveRow {
                    p_prime: x.value(),
                    target_from_pprime: curve.target_from_pprime(x),
                    p: x.value(),
                    target_from_p: curve.target_from_p(x),
                }
            })
            .collect(),
    )
}

pub fn write_curve<W: Write>(rows: &[CurveRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.p_prime.to_string(),
            r.target_from_pprime.to_string(),
            r.p.to_string(),
            r.target_from_p.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the target-curve CSV for `curve` to `out`.
pub fn print_target_curve<W: Write>(
    curve: &SoftTargetCurve,
    grid: usize,
    out: W,
) -> Result<(), csv::Error> {
    let rows = target_curve(curve, grid).ok_or_else(|| {
        csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "grid must be at least 2",
        ))
    })?;
    write_curve(&rows, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> SoftTargetCurve {
        SoftTargetCurve::new(0.005, 0.095).unwrap()
    }

    #[test]
    fn two_point_grid_is_the_endpoints() {
        let rows = target_curve(&curve(), 2).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].target_from_pprime, 0.005);
        assert_eq!(rows[0].target_from_p, 0.005);
        assert_eq!(rows[1].target_from_pprime, 0.005 + 0.095);
        assert_eq!(rows[1].target_from_p, 0.005 + 0.095);
        assert!(target_curve(&curve(), 1).is_none());
    }

    #[test]
    fn columns_are_monotone() {
        let rows = target_curve(&curve(), 101).unwrap();
        for w in rows.windows(2) {
            assert!(w[0].target_from_pprime <= w[1].target_from_pprime);
            assert!(w[0].target_from_p <= w[1].target_from_p);
        }
    }

    #[test]
    fn p_panel_matches_pprime_panel_at_squares() {
        // Grid of 11: p′ = i/10 and p = (i/10)² lands on grid points for i ∈ {0, 10}
        // and, with 101 points, on every p = (i/10)².
        let rows = target_curve(&curve(), 101).unwrap();
        for i in 0..=10 {
            let pprime_row = rows[i * 10];
            let p_row = rows[i * i];
            assert!((pprime_row.target_from_pprime - p_row.target_from_p).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        print_target_curve(&curve(), 3, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("p_prime,target_from_pprime_s,p,target_from_p_s")
        );
        assert_eq!(lines.count(), 3);
    }
}
