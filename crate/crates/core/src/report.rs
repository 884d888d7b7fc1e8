use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    /// Informational record; never affects the outcome.
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        })
    }
}

/// One checked identity or inequality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Record {
    pub suite: String,
    pub check: String,
    pub lhs: String,
    pub rhs: String,
    pub verdict: Verdict,
}

impl Record {
    /// Tab-separated line: `suite check lhs rhs verdict`.
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}\t{}\t{}", self.suite, self.check, self.lhs, self.rhs, self.verdict)
    }

    pub fn parse_line(line: &str) -> Option<Record> {
        let mut parts = line.split('\t');
        let suite = parts.next()?.to_string();
        let check = parts.next()?.to_string();
        let lhs = parts.next()?.to_string();
        let rhs = parts.next()?.to_string();
        let verdict = match parts.next()? {
            "PASS" => Verdict::Pass,
            "FAIL" => Verdict::Fail,
            "INFO" => Verdict::Info,
            _ => return None,
        };
        Some(Record { suite, check, lhs, rhs, verdict })
    }
}

/// Ordered list of records. Merging is concatenation, so it is associative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub records: Vec<Record>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        suite: &str,
        check: impl Into<String>,
        lhs: impl fmt::Display,
        rhs: impl fmt::Display,
        ok: bool,
    ) {
        self.records.push(Record {
            suite: suite.to_string(),
            check: check.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        });
    }

    pub fn info(&mut self, suite: &str, check: impl Into<String>, lhs: impl fmt::Display, rhs: impl fmt::Display) {
        self.records.push(Record {
            suite: suite.to_string(),
            check: check.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            verdict: Verdict::Info,
        });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> + '_ {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn find(&self, check_prefix: &str) -> impl Iterator<Item = &Record> + '_ {
        let prefix = check_prefix.to_string();
        self.records.iter().filter(move |r| r.check.starts_with(&prefix))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(f, "{}", r.to_line())?;
        }
        Ok(())
    }
}
