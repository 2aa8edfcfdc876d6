//! Tables and certificate logs, rendered as CSV and markdown.

use crate::fhc::FhcCertificate;
use num_traits::ToPrimitive;

use crate::rational::format_rational;
use crate::vector::NormValue;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Table { title: title.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = row.into_iter().map(|c| c.to_string()).collect();
        assert_eq!(row.len(), self.header.len(), "row width differs from header in `{}`", self.title);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        write_csv(&self.header, &self.rows)
    }

    pub fn to_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!("### {}\n\n", self.title);
        out += &format!("| {} |\n", self.header.iter().map(|h| esc(h)).collect::<Vec<_>>().join(" | "));
        out += &format!("|{}\n", "---|".repeat(self.header.len()));
        for row in &self.rows {
            out += &format!("| {} |\n", row.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "));
        }
        out
    }
}

fn write_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
}

/// One checked inequality or identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertRow {
    pub check: String,
    pub subject: String,
    pub index: String,
    pub value: String,
    pub bound: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CertificateLog {
    pub rows: Vec<CertRow>,
}

impl CertificateLog {
    pub const HEADER: [&'static str; 6] = ["check", "subject", "index", "value", "bound", "status"];

    pub fn push(
        &mut self,
        check: &str,
        subject: impl ToString,
        index: impl ToString,
        value: impl ToString,
        bound: impl ToString,
        ok: bool,
    ) {
        self.rows.push(CertRow {
            check: check.to_string(),
            subject: subject.to_string(),
            index: index.to_string(),
            value: value.to_string(),
            bound: bound.to_string(),
            ok,
        });
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn first_failure(&self) -> Option<&CertRow> {
        self.rows.iter().find(|r| !r.ok)
    }

    pub fn to_csv(&self) -> Result<String> {
        let header: Vec<String> = Self::HEADER.iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.check.clone(),
                    r.subject.clone(),
                    r.index.clone(),
                    r.value.clone(),
                    r.bound.clone(),
                    if r.ok { "verified" } else { "FAILED" }.to_string(),
                ]
            })
            .collect();
        write_csv(&header, &rows)
    }
}

/// Exact form when short, otherwise a six-digit approximation marked with ≈.
pub fn short_norm(v: &NormValue) -> String {
    let exact = v.to_string();
    if exact.len() <= 24 {
        return exact;
    }
    let raw = v.squared().to_f64().unwrap_or(f64::NAN);
    format!("≈{:.6e}", raw.sqrt())
}

/// Schedule table, per-class records and visit table.
pub fn fhc_tables(cert: &FhcCertificate) -> Vec<Table> {
    let s = &cert.schedule;
    let mut schedule = Table::new("Density schedule", &["p", "N_p", "a_p", "L", "density"]);
    for p in 0..s.classes() {
        schedule.push([
            p.to_string(),
            s.sizes()[p].to_string(),
            s.offsets()[p].to_string(),
            s.period().to_string(),
            format_rational(&s.density()),
        ]);
    }
    let mut classes = Table::new(
        "Classes",
        &["p", "x_p", "eps_p", "delta_p", "R_p", "norm z_p", "shadow error", "worst (b)", "worst (c)", "cases 1-5"],
    );
    for c in &cert.classes {
        // counts for cases 1 to 5, skipping steps outside every block
        let cases: Vec<String> = c.case_counts[1..].iter().map(|n| n.to_string()).collect();
        classes.push([
            c.p.to_string(),
            c.x_p.to_string(),
            format_rational(&c.eps_p),
            format_rational(&c.delta_p),
            c.r_p.to_string(),
            short_norm(&c.z_norm),
            short_norm(&c.shadow_error),
            short_norm(&c.worst_b),
            short_norm(&c.worst_c),
            cases.join("/"),
        ]);
    }
    let mut visits = Table::new("Visits", &["p", "radius", "required", "visits", "contained", "density", "1/(2L)"]);
    let floor = crate::Rational::new(1.into(), (2 * s.period()).into());
    for v in &cert.visits {
        visits.push([
            v.p.to_string(),
            format_rational(&v.radius),
            v.required.len().to_string(),
            v.visits.len().to_string(),
            v.contained.to_string(),
            format_rational(&v.density),
            format_rational(&floor),
        ]);
    }
    vec![schedule, classes, visits]
}

/// Adds the properties (a), (b), (c) and the visit checks to `log`.
pub fn fhc_log(cert: &FhcCertificate, log: &mut CertificateLog) {
    for c in &cert.classes {
        let subject = format!("class {}", c.p);
        let eps = format_rational(&c.eps_p);
        log.push("fhc (a) norm z_p", &subject, 0, &c.z_norm, &eps, c.z_norm.lt(&c.eps_p));
        log.push("fhc (b) worst peak", &subject, c.peak_times.len(), &c.worst_b, &eps, c.worst_b.lt(&c.eps_p));
        log.push("fhc (c) worst off-block", &subject, c.c_checked, &c.worst_c, &eps, c.worst_c.lt(&c.eps_p));
    }
    let two = crate::rational::int(2);
    log.push("fhc norm z", "z", 0, &cert.z_norm, "2", cert.z_norm.le(&two));
    let floor = crate::Rational::new(1.into(), (2 * cert.schedule.period()).into());
    for v in &cert.visits {
        let subject = format!("class {}", v.p);
        log.push("fhc visits contain schedule", &subject, v.required.len(), v.visits.len(), "", v.contained);
        log.push(
            "fhc visit density",
            &subject,
            cert.horizon,
            format_rational(&v.density),
            format_rational(&floor),
            v.density >= floor,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_markdown_escapes() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(["1/2", "{0:1, 1:2}"]);
        t.push(["x|y", "z"]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1/2,\"{0:1, 1:2}\"\nx|y,z\n");
        assert!(t.to_markdown().contains("x\\|y"));
    }

    #[test]
    fn long_norms_are_abbreviated() {
        use crate::rational::rat;
        use crate::vector::NormKind;
        assert_eq!(short_norm(&NormValue::from_exact(NormKind::One, rat(1, 4))), "1/4");
        let long = NormValue::from_exact(NormKind::One, rat(1, 4) + rat(1, 1_000_000_007) * rat(1, 1_000_000_009));
        assert!(short_norm(&long).starts_with("≈2.5"));
    }

    #[test]
    fn log_reports_first_failure() {
        let mut log = CertificateLog::default();
        log.push("c", "s", 0, "1/4", "1/2", true);
        log.push("c", "s", 1, "1", "1/2", false);
        assert!(!log.all_ok());
        assert_eq!(log.first_failure().unwrap().index, "1");
        assert!(log.to_csv().unwrap().lines().nth(2).unwrap().ends_with("FAILED"));
    }
}
