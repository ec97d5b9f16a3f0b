use super::eoc::eoc_tail;
use crate::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// Number of trailing rows used for slopes.
pub const EOC_WINDOW: usize = 3;

/// One refinement level of a study.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReportRow {
    pub level: usize,
    pub h: f64,
    pub ndof: usize,
    pub l2_error: Option<f64>,
    pub hcurl_error: Option<f64>,
    pub pullback_error: Option<f64>,
    pub d0: Option<f64>,
    pub d1: Option<f64>,
    pub hausdorff: Option<f64>,
}

/// Least-squares slopes of each error column against `h`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Slopes {
    pub l2_error: Option<f64>,
    pub hcurl_error: Option<f64>,
    pub pullback_error: Option<f64>,
    pub d0: Option<f64>,
    pub d1: Option<f64>,
    pub hausdorff: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvergenceReport {
    pub study: String,
    pub k: usize,
    pub geo_order: usize,
    pub materials: String,
    rows: Vec<ReportRow>,
}

type Column = fn(&ReportRow) -> Option<f64>;

const OPTIONAL: [(&str, Column); 4] = [
    ("pullback_error", |r| r.pullback_error),
    ("d0", |r| r.d0),
    ("d1", |r| r.d1),
    ("hausdorff", |r| r.hausdorff),
];

impl ConvergenceReport {
    pub fn new(study: impl Into<String>, k: usize, geo_order: usize, materials: impl Into<String>) -> Self {
        ConvergenceReport {
            study: study.into(),
            k,
            geo_order,
            materials: materials.into(),
            rows: Vec::new(),
        }
    }

    /// Adds a row, keeping rows ordered by decreasing `h`.
    pub fn push(&mut self, row: ReportRow) {
        let at = self.rows.partition_point(|r| r.h >= row.h);
        self.rows.insert(at, row);
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    fn slope(&self, col: Column) -> Option<f64> {
        let pairs: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| col(r).map(|e| (r.h, e)))
            .collect();
        if pairs.len() < 2 {
            return None;
        }
        let (h, e): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        eoc_tail(&h, &e, EOC_WINDOW).ok()
    }

    pub fn slopes(&self) -> Slopes {
        Slopes {
            l2_error: self.slope(|r| r.l2_error),
            hcurl_error: self.slope(|r| r.hcurl_error),
            pullback_error: self.slope(|r| r.pullback_error),
            d0: self.slope(|r| r.d0),
            d1: self.slope(|r| r.d1),
            hausdorff: self.slope(|r| r.hausdorff),
        }
    }

    /// CSV with columns `level,h,ndof,l2_error,hcurl_error` followed by the
    /// optional columns present in any row.
    pub fn to_csv(&self) -> String {
        let extra: Vec<&(&str, Column)> = OPTIONAL
            .iter()
            .filter(|(_, f)| self.rows.iter().any(|r| f(r).is_some()))
            .collect();
        let mut out = String::from("level,h,ndof,l2_error,hcurl_error");
        for (name, _) in &extra {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{:.12e},{},{},{}",
                r.level,
                r.h,
                r.ndof,
                fmt(r.l2_error),
                fmt(r.hcurl_error)
            );
            for (_, f) in &extra {
                out.push(',');
                out.push_str(&fmt(f(r)));
            }
            out.push('\n');
        }
        out
    }

    /// Log-log plot of every error column against `h`, with dashed
    /// reference slopes.
    pub fn to_svg(&self) -> String {
        let series: Vec<(&str, Vec<(f64, f64)>)> = [
            ("l2_error", (|r| r.l2_error) as Column),
            ("hcurl_error", |r| r.hcurl_error),
            ("pullback_error", |r| r.pullback_error),
            ("d0", |r| r.d0),
            ("d1", |r| r.d1),
            ("hausdorff", |r| r.hausdorff),
        ]
        .into_iter()
        .map(|(name, f)| {
            let pts = self
                .rows
                .iter()
                .filter_map(|r| f(r).filter(|e| *e > 0.0 && r.h > 0.0).map(|e| (r.h.log10(), e.log10())))
                .collect();
            (name, pts)
        })
        .filter(|(_, p): &(&str, Vec<(f64, f64)>)| !p.is_empty())
        .collect();
        let (w, hgt, pad) = (640.0, 480.0, 60.0);
        let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
        let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), (x, y)| (a.min(*x), b.max(*x), c.min(*y), d.max(*y)),
        );
        if all.is_empty() {
            (x0, x1, y0, y1) = (-1.0, 0.0, -1.0, 0.0);
        }
        if x1 - x0 < 1e-9 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-9 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
        let sy = |y: f64| hgt - pad - (y - y0) / (y1 - y0) * (hgt - 2.0 * pad);
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#ff7f0e"];
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" viewBox="0 0 {w} {hgt}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{} (k = {}, order {})</text>"#,
            w / 2.0,
            self.study,
            self.k,
            self.geo_order
        );
        let _ = writeln!(
            s,
            r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            w - 2.0 * pad,
            hgt - 2.0 * pad
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log10 h</text>"#,
            w / 2.0,
            hgt - 15.0
        );
        let _ = writeln!(
            s,
            r#"<text x="15" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 15 {})" text-anchor="middle">log10 error</text>"#,
            hgt / 2.0,
            hgt / 2.0
        );
        // Reference slopes anchored at the finest point of the first series.
        if let Some((_, pts)) = series.first() {
            let (ax, ay) = pts[pts.len() - 1];
            for (i, p) in [1.0, 1.5, 2.0, 3.0].iter().enumerate() {
                let bx = x1;
                let by = ay + p * (bx - ax);
                let _ = writeln!(
                    s,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="4 3"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" fill="#555">slope {p}</text>"##,
                    sx(ax),
                    sy(ay),
                    sx(bx),
                    sy(by),
                    sx(bx) + 3.0,
                    sy(by) + 10.0 * i as f64 - 5.0
                );
            }
        }
        for (i, (name, pts)) in series.iter().enumerate() {
            let c = colors[i % colors.len()];
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
                path.join(" ")
            );
            for (x, y) in pts {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, sx(*x), sy(*y));
            }
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{c}">{name}</text>"#,
                pad + 10.0,
                pad + 18.0 * (i + 1) as f64
            );
        }
        s.push_str("</svg>\n");
        s
    }

    /// Metadata, rows and slopes, merged with `extra` fields.
    pub fn to_json(&self, extra: serde_json::Value) -> Result<String> {
        let mut v = serde_json::json!({
            "study": self.study,
            "k": self.k,
            "geo_order": self.geo_order,
            "materials": self.materials,
            "eoc_window": EOC_WINDOW,
            "slopes": self.slopes(),
            "rows": self.rows,
        });
        if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
            obj.extend(more);
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    /// Writes `<stem>.csv`, `<stem>.svg` and `<stem>.json` into `dir`.
    pub fn emit(&self, dir: impl AsRef<Path>, stem: &str, extra: serde_json::Value) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        if stem.is_empty() {
            return Err(Error::InvalidInput("empty report name".into()));
        }
        std::fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?;
        std::fs::write(dir.join(format!("{stem}.svg")), self.to_svg())?;
        std::fs::write(dir.join(format!("{stem}.json")), self.to_json(extra)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConvergenceReport {
        let mut r = ConvergenceReport::new("ball-convergence", 1, 1, "ball");
        for (level, h) in [(2, 0.25), (0, 1.0), (1, 0.5), (3, 0.125)] {
            r.push(ReportRow {
                level,
                h,
                ndof: 10 * (level + 1),
                l2_error: Some(h * h),
                hcurl_error: Some(h),
                d0: if level > 0 { Some(2.0 * h * h) } else { None },
                ..Default::default()
            });
        }
        r
    }

    #[test]
    fn rows_sorted_and_slopes() {
        let r = sample();
        let levels: Vec<usize> = r.rows().iter().map(|x| x.level).collect();
        assert_eq!(levels, [0, 1, 2, 3]);
        let s = r.slopes();
        assert!((s.hcurl_error.unwrap() - 1.0).abs() < 1e-12);
        assert!((s.l2_error.unwrap() - 2.0).abs() < 1e-12);
        assert!((s.d0.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(s.pullback_error, None);
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "level,h,ndof,l2_error,hcurl_error,d0");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,1.000000000000e0,10,"));
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn emits_three_files() {
        let dir = tempfile::tempdir().unwrap();
        sample().emit(dir.path(), "run", serde_json::json!({"seconds": 1.5})).unwrap();
        let svg = std::fs::read_to_string(dir.path().join("run.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
        assert_eq!(json["seconds"], 1.5);
        assert_eq!(json["rows"].as_array().unwrap().len(), 4);
    }
}
