use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};

/// Structured text report. The `[machine]` section has a stable
/// `key=value` schema and is byte-identical across reruns; the header
/// timestamp and the `[human]` section are free-form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub machine: Vec<(String, String)>,
    /// Named `(x, y)` series for plotting.
    pub panels: BTreeMap<String, Vec<(f64, f64)>>,
    pub human: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl ToString) {
        self.machine.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.machine.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn point(&mut self, panel: &str, x: f64, y: f64) {
        self.panels.entry(panel.to_string()).or_default().push((x, y));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.human.push(line.into());
    }

    pub fn machine_section(&self) -> String {
        let mut out = String::from("[machine]\n");
        for (k, v) in &self.machine {
            writeln!(out, "{k}={v}").unwrap();
        }
        for (name, pts) in &self.panels {
            for (i, (x, y)) in pts.iter().enumerate() {
                writeln!(out, "panel.{name}.{i}={x},{y}").unwrap();
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut out = format!("# sumproj report: {}\n# generated: unix {secs}\n", self.title);
        out.push_str(&self.machine_section());
        out.push_str("[human]\n");
        for l in &self.human {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut report = Report::default();
        let mut section = "";
        for (ln, raw) in text.lines().enumerate() {
            if let Some(t) = raw.strip_prefix("# sumproj report: ") {
                report.title = t.to_string();
                continue;
            }
            if raw.starts_with('#') && section != "[human]" {
                continue;
            }
            if raw == "[machine]" || raw == "[human]" {
                section = if raw == "[machine]" { "[machine]" } else { "[human]" };
                continue;
            }
            match section {
                "[machine]" => {
                    if raw.trim().is_empty() {
                        continue;
                    }
                    let (k, v) = raw
                        .split_once('=')
                        .ok_or_else(|| perr(ln + 1, format!("expected key=value, got `{raw}`")))?;
                    if let Some(rest) = k.strip_prefix("panel.") {
                        let (name, _) = rest
                            .rsplit_once('.')
                            .ok_or_else(|| perr(ln + 1, format!("bad panel key `{k}`")))?;
                        let (x, y) = v
                            .split_once(',')
                            .ok_or_else(|| perr(ln + 1, format!("bad panel value `{v}`")))?;
                        let num = |t: &str| t.parse::<f64>().map_err(|e| perr(ln + 1, e.to_string()));
                        report.point(name, num(x)?, num(y)?);
                    } else {
                        report.put(k, v);
                    }
                }
                "[human]" => report.human.push(raw.to_string()),
                _ => return Err(perr(ln + 1, "content before the [machine] section".into())),
            }
        }
        Ok(report)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn slug(title: &str) -> String {
    let s: String = title
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    if s.is_empty() {
        "report".into()
    } else {
        s
    }
}

/// Writes one `<panel>.dat` file of `x y` rows per panel. A report without
/// panels yields a single header-only file named after its title.
pub fn emit_plot_data(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if report.panels.is_empty() {
        let path = dir.join(format!("{}.dat", slug(&report.title)));
        fs::write(&path, "# x y\n")?;
        written.push(path);
        return Ok(written);
    }
    for (name, pts) in &report.panels {
        let mut body = String::from("# x y\n");
        for (x, y) in pts {
            writeln!(body, "{x} {y}").unwrap();
        }
        let path = dir.join(format!("{name}.dat"));
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
