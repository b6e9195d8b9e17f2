use serde::Serialize;
use serde_json::value::RawValue;

use super::json_real;
use crate::engine::ResidualReport;

/// Labels attached to a residual report on export.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportContext {
    pub map: String,
    pub s: String,
}

#[derive(Serialize)]
struct CheckDoc<'a> {
    name: &'a str,
    max_residual: Box<RawValue>,
    relative: Box<RawValue>,
    exact_zero: bool,
    first_nonzero_order: Option<usize>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    map: &'a str,
    order: usize,
    domain: &'a str,
    s: &'a str,
    all_exact_zero: bool,
    checks: Vec<CheckDoc<'a>>,
    skipped: &'a [String],
}

pub fn report_to_json(report: &ResidualReport, ctx: &ReportContext) -> String {
    let doc = ReportDoc {
        map: &ctx.map,
        order: report.order,
        domain: &report.domain,
        s: &ctx.s,
        all_exact_zero: report.all_exact_zero(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckDoc {
                name: &c.name,
                max_residual: json_real(c.max_residual),
                relative: json_real(c.relative),
                exact_zero: c.exact_zero,
                first_nonzero_order: c.first_nonzero_order,
            })
            .collect(),
        skipped: &report.skipped,
    };
    let mut out = serde_json::to_string(&doc).expect("report serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_lookup;
    use crate::engine::{check_conjugacy, default_composition_times, solve_psi};

    #[test]
    fn report_has_per_check_residuals() {
        let entry = catalog_lookup("schroder-example").unwrap();
        let map = entry.exact_map(6).unwrap();
        let pair = solve_psi(&map, 6).unwrap();
        let report = check_conjugacy(&pair, &map, &default_composition_times()).unwrap();
        let ctx = ReportContext {
            map: "schroder-example".into(),
            s: "2/1".into(),
        };
        let text = report_to_json(&report, &ctx);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["all_exact_zero"], true);
        let checks = v["checks"].as_array().unwrap();
        assert!(checks.len() >= 4);
        for c in checks {
            assert_eq!(c["max_residual"], 0);
        }
        assert_eq!(text, report_to_json(&report, &ctx));
    }
}
