//! CSV tables and standalone SVG plots.
//!
//! Reals are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly.

use std::fmt::Write as _;

use featxform_core::analysis::{AlignmentMatrix, Histogram, IntervalWidthReport};
use featxform_core::harness::RDPoint;
use featxform_core::FitMode;

use crate::error::{Error, Result};

pub const RD_HEADER: [&str; 7] = ["mode", "levels", "fit_tag", "eval_tag", "bpfp", "mse", "header_bits_share"];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn write_row<I, S>(w: &mut csv::Writer<Vec<u8>>, row: I)
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(row).expect("writing to memory");
}

pub fn rd_csv(points: &[RDPoint]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Param("no RD points to report".into()));
    }
    let mut w = writer();
    write_row(&mut w, RD_HEADER);
    for p in points {
        write_row(
            &mut w,
            [
                p.mode.name().to_string(),
                p.levels.to_string(),
                p.source_tag.clone(),
                p.eval_tag.clone(),
                real(p.bpfp),
                real(p.mse),
                real(p.header_bits_share),
            ],
        );
    }
    Ok(finish(w))
}

pub fn parse_rd_csv(text: &str) -> Result<Vec<RDPoint>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?;
    if header.iter().ne(RD_HEADER) {
        return Err(Error::Format("unexpected RD csv header".into()));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Format(format!("bad number '{s}'")));
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            Ok(RDPoint {
                mode: FitMode::from_name(&rec[0])?,
                levels: rec[1].parse().map_err(|_| Error::Format(format!("bad levels '{}'", &rec[1])))?,
                source_tag: rec[2].to_string(),
                eval_tag: rec[3].to_string(),
                bpfp: num(&rec[4])?,
                mse: num(&rec[5])?,
                header_bits_share: num(&rec[6])?,
            })
        })
        .collect()
}

/// One row per bin: edges, count and cumulative fraction.
pub fn histogram_csv(hist: &Histogram, cdf: &[f64]) -> String {
    let mut w = writer();
    write_row(&mut w, ["bin", "lo", "hi", "count", "cdf"]);
    for (b, (&c, &f)) in hist.counts().iter().zip(cdf).enumerate() {
        let e = hist.edges();
        write_row(&mut w, [b.to_string(), real(e[b]), real(e[b + 1]), c.to_string(), real(f)]);
    }
    finish(w)
}

pub fn widths_csv(report: &IntervalWidthReport) -> String {
    let mut w = writer();
    write_row(&mut w, ["region", "width", "log10_width"]);
    for iw in &report.widths {
        write_row(&mut w, [iw.region.to_string(), real(iw.width), real(iw.log10_width)]);
    }
    write_row(&mut w, ["mean".to_string(), real(report.mean_width), real(report.mean_width.log10())]);
    finish(w)
}

/// Square table with row labels in the first column.
pub fn matrix_csv(corner: &str, labels: &[String], cells: &[Vec<f64>]) -> String {
    let mut w = writer();
    write_row(&mut w, std::iter::once(corner.to_string()).chain(labels.iter().cloned()));
    for (label, row) in labels.iter().zip(cells) {
        write_row(&mut w, std::iter::once(label.clone()).chain(row.iter().map(|&x| real(x))));
    }
    finish(w)
}

pub fn kl_csv(m: &AlignmentMatrix) -> String {
    matrix_csv("p\\q", &m.labels, &m.kl)
}

/// `cell[i][j]` is how much worse codebook `i` codes source `j` than source
/// `j`'s own codebook; the diagonal is zero.
pub fn cross_excess_csv(matrix: &[Vec<RDPoint>]) -> String {
    let labels: Vec<String> = matrix.iter().map(|row| row[0].source_tag.clone()).collect();
    let cells: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| row.iter().enumerate().map(|(j, p)| p.mse - matrix[j][j].mse).collect())
        .collect();
    matrix_csv("fit\\eval", &labels, &cells)
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self { x: pad(x), y: pad(y) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * MARGIN)
    }
}

fn svg_open(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN, H - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for (v, anchor, x, y) in [
        (f.x.0, "start", x0, y0 + 16.0),
        (f.x.1, "end", x1, y0 + 16.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" font-size="11" text-anchor="{anchor}">{v:.4}</text>"#);
    }
    for (v, y) in [(f.y.0, y0), (f.y.1, y1 + 4.0)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{y:.1}" font-size="11" text-anchor="end">{v:.4}</text>"#,
            x0 - 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
        coords.join(" ")
    );
}

/// Rate-distortion curves: bpfp against log10 mse, one polyline per
/// (mode, fit tag, eval tag) series, points ordered by bpfp.
pub fn rd_svg(points: &[RDPoint]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Param("no RD points to plot".into()));
    }
    let floor = points.iter().map(|p| p.mse).filter(|&m| m > 0.0).fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 1.0 };
    let ly = |m: f64| m.max(floor).log10();
    let mut series: Vec<((FitMode, &str, &str), Vec<&RDPoint>)> = Vec::new();
    for p in points {
        let key = (p.mode, p.source_tag.as_str(), p.eval_tag.as_str());
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(p),
            None => series.push((key, vec![p])),
        }
    }
    let xr = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.bpfp), b.max(p.bpfp)));
    let yr = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(ly(p.mse)), b.max(ly(p.mse))));
    let f = Frame::new(xr, yr);

    let mut out = String::new();
    svg_open(&mut out, "rate-distortion");
    axes(&mut out, &f, "bpfp", "log10 mse");
    for (i, ((mode, fit, eval), pts)) in series.iter_mut().enumerate() {
        pts.sort_by(|a, b| a.bpfp.total_cmp(&b.bpfp).then(a.levels.cmp(&b.levels)));
        let color = PALETTE[i % PALETTE.len()];
        let xy: Vec<(f64, f64)> = pts.iter().map(|p| (f.px(p.bpfp), f.py(ly(p.mse)))).collect();
        polyline(&mut out, &xy, color);
        for (x, y) in &xy {
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
        }
        let label = if fit == eval { format!("{mode} {fit}") } else { format!("{mode} {fit}->{eval}") };
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" fill="{color}">{}</text>"#,
            W - MARGIN - 150.0,
            MARGIN + 14.0 * (i as f64 + 1.0),
            escape(&label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Log-frequency bars with the empirical CDF overlaid on a [0, 1] scale.
pub fn histogram_svg(hist: &Histogram, cdf: &[f64], title: &str) -> String {
    let e = hist.edges();
    let top = hist.counts().iter().map(|&c| ((c + 1) as f64).log10()).fold(0.0, f64::max);
    let f = Frame::new((e[0], e[e.len() - 1]), (0.0, top.max(1e-12)));
    let mut out = String::new();
    svg_open(&mut out, title);
    axes(&mut out, &f, "value", "log10(count + 1)");
    for (b, &c) in hist.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (x0, x1) = (f.px(e[b]), f.px(e[b + 1]));
        let y = f.py(((c + 1) as f64).log10());
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1"/>"##,
            (x1 - x0).max(0.5),
            H - MARGIN - y
        );
    }
    let xy: Vec<(f64, f64)> = cdf
        .iter()
        .enumerate()
        .map(|(b, &c)| (f.px(e[b + 1]), H - MARGIN - c * (H - 2.0 * MARGIN)))
        .collect();
    polyline(&mut out, &xy, "#d62728");
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(mode: FitMode, levels: u32, bpfp: f64, mse: f64) -> RDPoint {
        RDPoint {
            mode,
            levels,
            bpfp,
            mse,
            source_tag: "fit,a".into(),
            eval_tag: "eval \"b\"".into(),
            header_bits_share: 0.125,
        }
    }

    #[test]
    fn rd_csv_round_trip() {
        let pts = vec![
            point(FitMode::LloydMax, 2, 0.1, 1.0 / 3.0),
            point(FitMode::Uniform, 4, 0.30000000000000004, 1e-300),
            point(FitMode::EqualFreq, 256, 8.0, 0.0),
        ];
        let text = rd_csv(&pts).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("mode,levels,fit_tag,eval_tag,bpfp,mse,header_bits_share\n"));
        assert_eq!(parse_rd_csv(&text).unwrap(), pts);
        assert_eq!(rd_csv(&[]).unwrap_err().kind(), "param-error");
    }

    #[test]
    fn rd_svg_groups_series() {
        let mut pts = vec![point(FitMode::LloydMax, 2, 0.5, 0.1), point(FitMode::LloydMax, 4, 0.2, 0.3)];
        pts.push(point(FitMode::Uniform, 2, 0.4, 0.2));
        let svg = rd_svg(&pts).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<?xml") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("fit,a\"") && svg.contains("&quot;b&quot;"));
        assert!(rd_svg(&[]).is_err());
    }

    #[test]
    fn matrix_layout() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let text = matrix_csv("x", &labels, &[vec![0.0, 1.5], vec![2.0, 0.0]]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,a,b");
        assert_eq!(lines[1], "a,0.0000000000000000e0,1.5000000000000000e0");
    }
}
