use bdlab_core::{Record, Verdict, VerificationReport};

use crate::{CliError, Config};

pub const FORMAT_VERSION: &str = "bdlab-report 1";

/// Header, records and summary; a pure function of its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFile {
    pub suite: String,
    pub config: Vec<(String, String)>,
    pub report: VerificationReport,
    /// Reproduction command attached to failed records.
    pub repro: String,
}

impl ReportFile {
    pub fn new(cfg: &Config, suite: &str, report: VerificationReport) -> ReportFile {
        ReportFile {
            suite: suite.to_string(),
            config: cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            report,
            repro: format!("bdlab verify {suite} {}", cfg.as_overrides()),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {FORMAT_VERSION}\n# suite {}\n", self.suite);
        for (k, v) in &self.config {
            out.push_str(&format!("# config {k} = {v}\n"));
        }
        for r in &self.report.records {
            out.push_str(&r.to_line());
            if r.verdict == Verdict::Fail {
                out.push_str(&format!("\trepro: {}", self.repro));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "# summary pass={} fail={} info={}\n",
            self.report.count(Verdict::Pass),
            self.report.count(Verdict::Fail),
            self.report.count(Verdict::Info)
        ));
        out
    }

    /// Reads a rendered report; the summary line is recomputed, not trusted.
    pub fn parse(text: &str) -> Result<ReportFile, CliError> {
        let bad = |m: String| CliError::Core(bdlab_core::Error::Parse(m));
        let mut lines = text.lines();
        if lines.next() != Some(&format!("# {FORMAT_VERSION}")) {
            return Err(bad("missing report header".into()));
        }
        let mut suite = String::new();
        let mut config = Vec::new();
        let mut report = VerificationReport::new();
        let mut repro = String::new();
        for line in lines {
            if let Some(rest) = line.strip_prefix("# suite ") {
                suite = rest.to_string();
            } else if let Some(rest) = line.strip_prefix("# config ") {
                let (k, v) = rest.split_once(" = ").ok_or_else(|| bad(format!("config line {line:?}")))?;
                config.push((k.to_string(), v.to_string()));
            } else if line.starts_with('#') || line.is_empty() {
                continue;
            } else {
                let record = Record::parse_line(line).ok_or_else(|| bad(format!("record {line:?}")))?;
                if let Some(cmd) = line.split('\t').nth(5).and_then(|s| s.strip_prefix("repro: ")) {
                    repro = cmd.to_string();
                }
                report.records.push(record);
            }
        }
        if repro.is_empty() {
            let sets: Vec<String> = config.iter().map(|(k, v)| format!("--set {k}={v}")).collect();
            repro = format!("bdlab verify {suite} {}", sets.join(" "));
        }
        Ok(ReportFile { suite, config, report, repro })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        let mut report = VerificationReport::new();
        report.push("x0", "a", 1, 1, true);
        report.push("x0", "b", 2, "<= 1", false);
        report.info("x0", "c", "note", "");
        let file = ReportFile::new(&Config::default(), "x0", report);
        let text = file.render();
        assert!(text.contains("\tFAIL\trepro: bdlab verify x0 --set N=3 --set theta=6/5"));
        assert!(text.ends_with("# summary pass=1 fail=1 info=1\n"));
        let back = ReportFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.render(), text);
    }

    #[test]
    fn rejects_foreign_text() {
        assert!(ReportFile::parse("hello\n").is_err());
    }
}
