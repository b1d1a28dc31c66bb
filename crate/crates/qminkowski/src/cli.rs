//! Command front end: run configuration, spectrum files (CSV, JSON, SVG),
//! verification reports, obstruction reports, tensor and operator dumps.
//!
//! Every command returns its output as a string so that the same code path
//! serves the `qmink` binary, the examples and the tests.  Output ordering is
//! fully determined by the configuration, so identical configurations give
//! byte-identical CSV and JSON.

use crate::error::{Error, Result};
use crate::hilbert::{spectrum_points, Sector, SectorKind, SpectrumPoint, TruncationWindow};
use crate::operators::{BuildOptions, OperatorSet};
use crate::qnum::DeformationParams;
use crate::tensors::{build_rmatrix4, epsilon4, FourIndexTensor, RMatrixVariant, Tensors, COMPONENT_LABELS};
use crate::verify::{evaluate_catalog, lightcone_obstruction, relation_catalog, VerifyOptions};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

/// Version of every JSON document written by this module.
pub const JSON_SCHEMA: u32 = 1;

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            "table" => Ok(Self::Table),
            other => Err(Error::InvalidParameter(format!(
                "unknown format '{other}' (expected csv, json, svg or table)"
            ))),
        }
    }
}

/// Everything a command needs: deformation, sector, window, tolerance and
/// output options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub q: f64,
    pub sector: SectorKind,
    /// `l₀`, `|t₀|` or `τ₀`.
    pub scale: f64,
    pub window: TruncationWindow,
    pub tol: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Light-cone phases of `Λ^{1/2}`; empty means all zero.
    pub phases: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::for_sector(SectorKind::SpaceLike)
    }
}

impl RunConfig {
    /// Defaults (`q = 1.1`, scale 1, default window, `tol = 1e-10`) for one
    /// sector.
    pub fn for_sector(sector: SectorKind) -> Self {
        Self {
            q: 1.1,
            sector,
            scale: 1.0,
            window: TruncationWindow::default_for(sector),
            tol: 1e-10,
            format: OutputFormat::Table,
            out: None,
            phases: Vec::new(),
        }
    }

    pub fn params(&self) -> Result<DeformationParams> {
        DeformationParams::new(self.q)
    }

    /// Checks `q`, the sector scale, the window and the tolerance.
    pub fn validate(&self) -> Result<(DeformationParams, Sector)> {
        let p = self.params()?;
        let sector = Sector::new(self.sector, self.scale, &p)?;
        TruncationWindow::new(
            self.window.j_max,
            (self.window.n_lo, self.window.n_hi),
            (self.window.level_lo, self.window.level_hi),
            self.window.margin,
        )?;
        if self.sector.is_time_like() && self.window.n_lo < 0 {
            return Err(Error::InvalidParameter(format!(
                "time-like sectors require n >= 0, got n from {}",
                self.window.n_lo
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok((p, sector))
    }

    /// Builds every generator on the configured sector.
    pub fn build_operators(&self) -> Result<OperatorSet> {
        let (p, sector) = self.validate()?;
        let opts = BuildOptions {
            light_phases: self.phases.clone(),
        };
        OperatorSet::build(&p, sector, self.window, &opts)
    }
}

/// Parses `a:b` into an inclusive integer range.
pub fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidParameter(format!("expected a range 'a:b', got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// Parses a comma-separated sector list; `all` expands to the three
/// massive sectors and the light cone.
pub fn parse_sectors(s: &str) -> Result<Vec<SectorKind>> {
    if s == "all" {
        return Ok(vec![
            SectorKind::TimeLikeForward,
            SectorKind::TimeLikeBackward,
            SectorKind::SpaceLike,
            SectorKind::LightLike,
        ]);
    }
    s.split(',').map(|t| t.trim().parse()).collect()
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

/// Spectrum points for several sectors sharing `q`, the scale and the window.
/// Time-like sectors start at `n = 0` whatever the window's lower bound.
pub fn collect_spectrum(config: &RunConfig, sectors: &[SectorKind]) -> Result<Vec<SpectrumPoint>> {
    let p = config.params()?;
    let w = config.window;
    let mut out = Vec::new();
    for &kind in sectors {
        let sector = Sector::new(kind, config.scale, &p)?;
        let n_lo = if kind.is_time_like() { w.n_lo.max(0) } else { w.n_lo };
        if n_lo > w.n_hi {
            return Err(Error::EmptyWindow(kind.tag().into()));
        }
        out.extend(spectrum_points(sector, &p, (n_lo, w.n_hi), (w.level_lo, w.level_hi))?);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct SpectrumRow {
    sector: String,
    #[serde(rename = "M")]
    level: i64,
    n: i64,
    t: f64,
    r: f64,
}

/// CSV with columns `sector, M, n, t, r` at full precision.
pub fn spectrum_csv(points: &[SpectrumPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for pt in points {
        w.serialize(SpectrumRow {
            sector: pt.sector.tag().into(),
            level: pt.level,
            n: pt.n,
            t: pt.t,
            r: pt.r,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Parses the output of [`spectrum_csv`].
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<SpectrumPoint>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    rd.deserialize::<SpectrumRow>()
        .map(|row| {
            let row = row?;
            Ok(SpectrumPoint {
                sector: row.sector.parse()?,
                n: row.n,
                level: row.level,
                t: row.t,
                r: row.r,
            })
        })
        .collect()
}

/// JSON document with the configuration and all points.
pub fn spectrum_json(config: &RunConfig, points: &[SpectrumPoint]) -> Result<String> {
    let doc = json!({
        "schema": JSON_SCHEMA,
        "q": config.q,
        "scale": config.scale,
        "window": config.window,
        "points": points,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn sector_colour(kind: SectorKind) -> &'static str {
    match kind {
        SectorKind::TimeLikeForward => "#1f5fbf",
        SectorKind::TimeLikeBackward => "#7a3fbf",
        SectorKind::SpaceLike => "#c0392b",
        SectorKind::LightLike => "#2e8b57",
    }
}

/// Scatter plot of `(r, t)` with `r` horizontal and `t` vertical, one
/// `<circle class="point">` per point and the two light-cone guide lines
/// `t = ±r`.
pub fn spectrum_svg(points: &[SpectrumPoint], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 640.0;
    const PAD: f64 = 60.0;
    let r_max = points.iter().map(|p| p.r).fold(1.0_f64, f64::max) * 1.05;
    let t_max = points.iter().map(|p| p.t.abs()).fold(1.0_f64, f64::max) * 1.05;
    let t_lo = -t_max;
    let x = |r: f64| PAD + (r / r_max) * (W - 2.0 * PAD);
    let y = |t: f64| H - PAD - (t - t_lo) / (t_max - t_lo) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        W / 2.0,
        xml_escape(title)
    );
    // Axes.
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
        x(0.0),
        y(0.0),
        x(r_max),
        y(0.0)
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
        x(0.0),
        y(t_lo),
        x(0.0),
        y(t_max)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">r</text>"#,
        x(r_max) + 8.0,
        y(0.0) + 5.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">t</text>"#,
        x(0.0) - 4.0,
        y(t_max) - 8.0
    );
    // Light-cone guides t = ±r, clipped to the plotted box.
    let reach = r_max.min(t_max);
    let _ = writeln!(
        s,
        r#"<line class="light-cone" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="6,4"/>"#,
        x(0.0),
        y(0.0),
        x(reach),
        y(reach)
    );
    let _ = writeln!(
        s,
        r#"<line class="light-cone" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="6,4"/>"#,
        x(0.0),
        y(0.0),
        x(reach),
        y(-reach)
    );
    for pt in points {
        let _ = writeln!(
            s,
            r#"<circle class="point" data-sector="{}" data-n="{}" data-M="{}" cx="{:.3}" cy="{:.3}" r="2.2" fill="{}"/>"#,
            pt.sector.tag(),
            pt.n,
            pt.level,
            x(pt.r),
            y(pt.t),
            sector_colour(pt.sector)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Spectrum in the configured format (`csv`, `json` or `svg`).
pub fn cmd_spectrum(config: &RunConfig, sectors: &[SectorKind]) -> Result<String> {
    let points = collect_spectrum(config, sectors)?;
    match config.format {
        OutputFormat::Csv | OutputFormat::Table => spectrum_csv(&points),
        OutputFormat::Json => spectrum_json(config, &points),
        OutputFormat::Svg => {
            let scale_name = if sectors.iter().all(|k| k.is_time_like()) {
                "t0"
            } else {
                "scale"
            };
            Ok(spectrum_svg(
                &points,
                &format!(
                    "Admissible (r, t) for q = {} and {scale_name} = {}",
                    config.q, config.scale
                ),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Runs the relation catalog; returns the rendered report and whether every
/// applicable relation passed (inconclusive relations count as failures).
pub fn cmd_verify(config: &RunConfig) -> Result<(String, bool)> {
    let set = config.build_operators()?;
    let catalog = relation_catalog(&set.params);
    let report = evaluate_catalog(&catalog, &set, VerifyOptions::uniform(config.tol))?;
    let ok = report.all_pass();
    let text = match config.format {
        OutputFormat::Json => {
            let doc = json!({
                "schema": JSON_SCHEMA,
                "q": config.q,
                "sector": config.sector.tag(),
                "scale": config.scale,
                "window": config.window,
                "dim": set.basis.dim(),
                "all_pass": ok,
                "relations": report.reports,
                "not_representable": report.skipped,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# q = {}, sector = {}, scale = {}, dim = {}, tol = {:e}",
                config.q,
                config.sector.tag(),
                config.scale,
                set.basis.dim(),
                config.tol
            );
            let _ = writeln!(
                s,
                "{:<28} {:>5} {:>8} {:>12} {:>12} {:>12}  status",
                "relation", "group", "interior", "max", "normalized", "tolerance"
            );
            for r in &report.reports {
                let status = if r.inconclusive {
                    "INCONCLUSIVE"
                } else if r.pass {
                    "pass"
                } else {
                    "FAIL"
                };
                let _ = writeln!(
                    s,
                    "{:<28} {:>5} {:>8} {:>12.3e} {:>12.3e} {:>12.1e}  {status}",
                    r.name, r.group, r.interior_dim, r.max_residual, r.normalized, r.tolerance
                );
            }
            for name in &report.skipped {
                let _ = writeln!(
                    s,
                    "{name:<28}  not representable (momenta do not exist on the light cone)"
                );
            }
            let failed = report.reports.iter().filter(|r| !r.pass).count();
            let _ = writeln!(
                s,
                "# {} checked, {} failed, {} not representable: {}",
                report.reports.len(),
                failed,
                report.skipped.len(),
                if ok { "ALL PASS" } else { "FAILURES" }
            );
            s
        }
    };
    Ok((text, ok))
}

// ---------------------------------------------------------------------------
// Obstruction
// ---------------------------------------------------------------------------

/// The light-cone probe; JSON with `--format json`, a short human-readable
/// summary otherwise.
pub fn cmd_obstruction(config: &RunConfig) -> Result<String> {
    if config.sector != SectorKind::LightLike {
        return Err(Error::InvalidParameter(format!(
            "obstruction applies to the light-like sector only, got {}",
            config.sector.tag()
        )));
    }
    let set = config.build_operators()?;
    let rep = lightcone_obstruction(&set)?;
    if config.format == OutputFormat::Json {
        let doc = json!({ "schema": JSON_SCHEMA, "report": rep });
        return Ok(serde_json::to_string_pretty(&doc)? + "\n");
    }
    let mut s = String::new();
    let _ = writeln!(s, "q = {}, tau0 = {}, kappa = {:.6}", rep.q, rep.tau0, rep.kappa);
    let _ = writeln!(s, "diagonal elements probed: {}", rep.points.len());
    let _ = writeln!(
        s,
        "max sigma_min/sigma_max of the 2x2 system: {:.3e}",
        rep.max_singular_ratio
    );
    let _ = writeln!(
        s,
        "min unabsorbable inhomogeneity |delta|/|kappa t|: {:.6}",
        rep.min_inhomogeneity
    );
    let _ = writeln!(s, "verdict: {}", rep.verdict);
    Ok(s)
}

// ---------------------------------------------------------------------------
// Tensors and operators
// ---------------------------------------------------------------------------

/// Names accepted by [`cmd_tensors`].
pub const TENSOR_NAMES: [&str; 16] = [
    "g",
    "eps",
    "eps-lower",
    "eps-upper",
    "eps-left",
    "eta",
    "rhat3",
    "P+",
    "P-",
    "PT",
    "PS",
    "PA",
    "R-I",
    "R-II",
    "R-II-inv",
    "eps4",
];

fn four_index(t: &FourIndexTensor) -> Value {
    json!(t.to_nested())
}

/// One constant tensor as JSON nested arrays.  The header documents the index
/// layout and component order.
pub fn cmd_tensors(config: &RunConfig, name: &str) -> Result<String> {
    let p = config.params()?;
    let t = Tensors::new(&p);
    let (layout, data): (&str, Value) = match name {
        "g" => ("g[A][B] = g_AB = g^AB", json!(t.g.lower)),
        "eps" => ("eps[A][B][C] = eps_AB^C", json!(t.eps.mixed)),
        "eps-lower" => ("eps[A][B][C] = eps_ABC", json!(t.eps.lower)),
        "eps-upper" => ("eps[A][B][C] = eps^ABC", json!(t.eps.upper)),
        "eps-left" => ("eps[C][A][B] = eps_C^AB", json!(t.eps.left_lower)),
        "eta" => ("eta[a][b] = eta_ab = eta^ab", json!(t.eta.eta)),
        "rhat3" => ("T[A][B][C][D] = Rhat^AB_CD", four_index(&t.rhat3)),
        "P+" => ("T[a][b][c][d] = (P+)^ab_cd", four_index(&t.proj.plus)),
        "P-" => ("T[a][b][c][d] = (P-)^ab_cd", four_index(&t.proj.minus)),
        "PT" => ("T[a][b][c][d] = (PT)^ab_cd", four_index(&t.proj.trace)),
        "PS" => ("T[a][b][c][d] = (PS)^ab_cd", four_index(&t.proj.symmetric)),
        "PA" => ("T[a][b][c][d] = (PA)^ab_cd", four_index(&t.proj.antisymmetric)),
        "R-I" => (
            "T[a][b][c][d] = (R_I)^ab_cd",
            four_index(&build_rmatrix4(RMatrixVariant::I, &t.proj, &p)),
        ),
        "R-II" => (
            "T[a][b][c][d] = (R_II)^ab_cd",
            four_index(&build_rmatrix4(RMatrixVariant::II, &t.proj, &p)),
        ),
        "R-II-inv" => ("T[a][b][c][d] = (R_II^-1)^ab_cd", four_index(&t.rhat_ii_inv)),
        "eps4" => ("T[a][b][c][d] = eps^ab_cd", four_index(&epsilon4(&t.proj))),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown tensor '{other}' (expected one of {})",
                TENSOR_NAMES.join(", ")
            )))
        }
    };
    let three_d = matches!(name, "g" | "rhat3") || name.starts_with("eps-") || name == "eps";
    let order: &[&str] = if three_d {
        &COMPONENT_LABELS[..3]
    } else {
        &COMPONENT_LABELS
    };
    let doc = json!({
        "schema": JSON_SCHEMA,
        "tensor": name,
        "q": config.q,
        "component_order": order,
        "layout": layout,
        "data": data,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// One non-zero matrix element of a dumped operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorEntry {
    pub row: String,
    pub col: String,
    pub re: f64,
    pub im: f64,
}

/// Every stored element of one generator as `(row-label, col-label, re, im)`,
/// in row-major order; JSON with `--format json`, CSV otherwise.
pub fn cmd_dump_op(config: &RunConfig, op: &str) -> Result<String> {
    let set = config.build_operators()?;
    let o = set.operator(op)?;
    let entries: Vec<OperatorEntry> = o
        .iter()
        .map(|(r, c, v)| OperatorEntry {
            row: set.basis.label(r).to_string(),
            col: set.basis.label(c).to_string(),
            re: v.re,
            im: v.im,
        })
        .collect();
    if config.format == OutputFormat::Json {
        let doc = json!({
            "schema": JSON_SCHEMA,
            "operator": o.name(),
            "q": config.q,
            "sector": config.sector.tag(),
            "scale": config.scale,
            "window": config.window,
            "dim": set.basis.dim(),
            "entries": entries,
        });
        return Ok(serde_json::to_string_pretty(&doc)? + "\n");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in &entries {
        w.serialize(e)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("-4:4").unwrap(), (-4, 4));
        assert!(parse_range("3:1").is_err());
        assert!(parse_range("3").is_err());
    }

    #[test]
    fn sector_lists_parse() {
        assert_eq!(parse_sectors("all").unwrap().len(), 4);
        assert_eq!(
            parse_sectors("time+,space").unwrap(),
            vec![SectorKind::TimeLikeForward, SectorKind::SpaceLike]
        );
        assert!(parse_sectors("nowhere").is_err());
    }

    #[test]
    fn apex_of_forward_cone() {
        let mut c = RunConfig::for_sector(SectorKind::TimeLikeForward);
        c.window.n_hi = 20;
        let pts = collect_spectrum(&c, &[SectorKind::TimeLikeForward]).unwrap();
        let apex = pts.iter().find(|p| p.n == 0 && p.level == 0).unwrap();
        assert!((apex.t - 1.0).abs() < 1e-14 && apex.r.abs() < 1e-14);
    }

    #[test]
    fn obstruction_rejects_massive_sectors() {
        let c = RunConfig::for_sector(SectorKind::TimeLikeForward);
        assert!(cmd_obstruction(&c).is_err());
    }

    #[test]
    fn time_like_window_must_start_at_zero() {
        let mut c = RunConfig::for_sector(SectorKind::TimeLikeForward);
        c.window.n_lo = -1;
        assert!(c.validate().is_err());
    }
}
