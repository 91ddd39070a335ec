//! Report rendering: a summary row, causal and conformance failure-reason
//! tables, and a numbered failure log, in markdown, CSV, or JSON. All three
//! formats are derived from the same counts.

use serde::Serialize;
use serde_json::json;

use sd_eval_core::eval::{CausalFailureKind, ConformanceFailureKind, FailureCategory, Suite};

use super::{RunReport, TestRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("not a report format: {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CausalFailureCounts {
    pub fake_relationship: usize,
    pub missing_relationship: usize,
    pub multiple: usize,
    pub polarity: usize,
}

impl CausalFailureCounts {
    pub fn total(&self) -> usize {
        self.fake_relationship + self.missing_relationship + self.multiple + self.polarity
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConformanceFailureCounts {
    pub multiple: usize,
    pub too_few_loops: usize,
    pub too_few_variables: usize,
    pub too_many_loops: usize,
    pub too_many_variables: usize,
    pub missing_required_variable: usize,
}

impl ConformanceFailureCounts {
    pub fn total(&self) -> usize {
        self.multiple
            + self.too_few_loops
            + self.too_few_variables
            + self.too_many_loops
            + self.too_many_variables
            + self.missing_required_variable
    }
}

pub fn causal_failure_counts(report: &RunReport) -> CausalFailureCounts {
    let mut counts = CausalFailureCounts::default();
    for record in report.results_for(Suite::CausalTranslation) {
        match record.outcome.category {
            Some(FailureCategory::Causal(CausalFailureKind::FakeRelationship)) => {
                counts.fake_relationship += 1
            }
            Some(FailureCategory::Causal(CausalFailureKind::MissingRelationship)) => {
                counts.missing_relationship += 1
            }
            Some(FailureCategory::Causal(CausalFailureKind::Multiple)) => counts.multiple += 1,
            Some(FailureCategory::Causal(CausalFailureKind::Polarity)) => counts.polarity += 1,
            _ => {}
        }
    }
    counts
}

pub fn conformance_failure_counts(report: &RunReport) -> ConformanceFailureCounts {
    let mut counts = ConformanceFailureCounts::default();
    for record in report.results_for(Suite::Conformance) {
        match record.outcome.category {
            Some(FailureCategory::Conformance(ConformanceFailureKind::Multiple)) => {
                counts.multiple += 1
            }
            Some(FailureCategory::Conformance(ConformanceFailureKind::TooFewLoops)) => {
                counts.too_few_loops += 1
            }
            Some(FailureCategory::Conformance(ConformanceFailureKind::TooFewVariables)) => {
                counts.too_few_variables += 1
            }
            Some(FailureCategory::Conformance(ConformanceFailureKind::TooManyLoops)) => {
                counts.too_many_loops += 1
            }
            Some(FailureCategory::Conformance(ConformanceFailureKind::TooManyVariables)) => {
                counts.too_many_variables += 1
            }
            Some(FailureCategory::Conformance(
                ConformanceFailureKind::MissingRequiredVariable,
            )) => counts.missing_required_variable += 1,
            _ => {}
        }
    }
    counts
}

/// The failure-log header line for one failing test.
fn log_entry_header(n: usize, model: &str, record: &TestRecord) -> String {
    match (&record.suite, &record.group) {
        (Suite::CausalTranslation, Some(group)) => format!(
            "{n}) {model} | {} | {group} | {}",
            record.suite.log_name(),
            record.title
        ),
        _ => format!("{n}) {model} | {} | {}", record.suite.log_name(), record.title),
    }
}

fn failing_records(report: &RunReport) -> Vec<&TestRecord> {
    report.results.iter().filter(|r| !r.outcome.pass).collect()
}

pub fn render_report(report: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => render_json(report),
    }
}

fn render_markdown(report: &RunReport) -> String {
    let causal = causal_failure_counts(report);
    let conformance = conformance_failure_counts(report);
    let card = &report.scorecard;
    let mut out = String::new();

    // The one nondeterministic line; everything below replays byte-exact.
    out.push_str(&format!(
        "Generated: {} (wall clock {} ms)\n\n",
        report.header.generated_at, report.header.wall_clock_ms
    ));
    out.push_str("# Evaluation report\n\n");
    out.push_str(&format!(
        "Engine: `{}` | Model: `{}` | Seed: {}\n\n",
        report.engine, report.model, report.seed
    ));

    out.push_str("## Overall results\n\n");
    out.push_str("| LLM | Causal Translation | Conformance | Overall |\n");
    out.push_str("| --- | --- | --- | --- |\n");
    out.push_str(&format!(
        "| {} | {}% | {}% | {}% |\n\n",
        report.model,
        card.causal_percent(),
        card.conformance_percent(),
        card.overall_percent()
    ));
    out.push_str(&format!(
        "Passed {}/{} causal translation tests and {}/{} conformance tests. Errored: {} (excluded from percentages).\n\n",
        card.causal_passed,
        card.causal_total,
        card.conformance_passed,
        card.conformance_total,
        report.errored.len()
    ));

    out.push_str("## Causal translation failures\n\n");
    out.push_str("| Reason for Failure | Fake relationship | Missing relationship | Multiple Kinds of Failures | Polarity | Grand Total |\n");
    out.push_str("| --- | --- | --- | --- | --- | --- |\n");
    out.push_str(&format!(
        "| {} | {} | {} | {} | {} | {} |\n\n",
        report.model,
        causal.fake_relationship,
        causal.missing_relationship,
        causal.multiple,
        causal.polarity,
        causal.total()
    ));

    out.push_str("## Conformance failures\n\n");
    out.push_str("| Reason for Failure | Multiple Kinds of Failures | Too few feedback loops | Too few variables | Too many feedback loops | Too many variables | Missing required variables | Grand Total |\n");
    out.push_str("| --- | --- | --- | --- | --- | --- | --- | --- |\n");
    out.push_str(&format!(
        "| {} | {} | {} | {} | {} | {} | {} | {} |\n\n",
        report.model,
        conformance.multiple,
        conformance.too_few_loops,
        conformance.too_few_variables,
        conformance.too_many_loops,
        conformance.too_many_variables,
        conformance.missing_required_variable,
        conformance.total()
    ));

    let failing = failing_records(report);
    out.push_str("## Failures\n\n");
    if failing.is_empty() {
        out.push_str("None.\n");
    }
    for (i, record) in failing.iter().enumerate() {
        out.push_str(&log_entry_header(i + 1, &report.model, record));
        out.push('\n');
        for message in record.outcome.messages() {
            out.push_str("\nMessage:\n\n");
            out.push_str(&message);
            out.push('\n');
        }
        out.push('\n');
    }

    if !report.errored.is_empty() {
        out.push_str("## Errored tests\n\n");
        for errored in &report.errored {
            out.push_str(&format!(
                "- {} ({}): {}\n",
                errored.id,
                errored.title,
                errored.error
            ));
        }
    }
    out
}

fn render_csv(report: &RunReport) -> String {
    let causal = causal_failure_counts(report);
    let conformance = conformance_failure_counts(report);
    let card = &report.scorecard;

    let mut writer = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());

    // One nondeterministic header record.
    writer
        .write_record([
            "header",
            &report.header.generated_at,
            &report.header.wall_clock_ms.to_string(),
        ])
        .expect("csv write");

    let w = &mut writer;
    let write = |w: &mut csv::Writer<Vec<u8>>, record: &[String]| {
        w.write_record(record).expect("csv write");
    };

    write(w, &str_record(&[
        "summary", "model", "causal_passed", "causal_total", "causal_percent",
        "conformance_passed", "conformance_total", "conformance_percent", "overall_percent",
        "errored",
    ]));
    write(w, &[
        "summary".into(),
        report.model.clone(),
        card.causal_passed.to_string(),
        card.causal_total.to_string(),
        card.causal_percent(),
        card.conformance_passed.to_string(),
        card.conformance_total.to_string(),
        card.conformance_percent(),
        card.overall_percent(),
        report.errored.len().to_string(),
    ]);

    write(w, &str_record(&[
        "causal_failures", "model", "fake_relationship", "missing_relationship",
        "multiple", "polarity", "grand_total",
    ]));
    write(w, &[
        "causal_failures".into(),
        report.model.clone(),
        causal.fake_relationship.to_string(),
        causal.missing_relationship.to_string(),
        causal.multiple.to_string(),
        causal.polarity.to_string(),
        causal.total().to_string(),
    ]);

    write(w, &str_record(&[
        "conformance_failures", "model", "multiple", "too_few_loops", "too_few_variables",
        "too_many_loops", "too_many_variables", "missing_required_variable", "grand_total",
    ]));
    write(w, &[
        "conformance_failures".into(),
        report.model.clone(),
        conformance.multiple.to_string(),
        conformance.too_few_loops.to_string(),
        conformance.too_few_variables.to_string(),
        conformance.too_many_loops.to_string(),
        conformance.too_many_variables.to_string(),
        conformance.missing_required_variable.to_string(),
        conformance.total().to_string(),
    ]);

    write(w, &str_record(&[
        "failure", "n", "model", "suite", "group", "title", "category", "messages",
    ]));
    for (i, record) in failing_records(report).iter().enumerate() {
        write(w, &[
            "failure".into(),
            (i + 1).to_string(),
            report.model.clone(),
            record.suite.log_name().to_string(),
            record.group.clone().unwrap_or_default(),
            record.title.clone(),
            record
                .outcome
                .category
                .map(|c| c.label().to_string())
                .unwrap_or_default(),
            record.outcome.messages().join("\n---\n"),
        ]);
    }

    for errored in &report.errored {
        write(w, &[
            "errored".into(),
            errored.id.clone(),
            errored.title.clone(),
            errored.error.clone(),
        ]);
    }

    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv utf8")
}

fn str_record(fields: &[&str]) -> Vec<String> {
    fields.iter().map(|s| s.to_string()).collect()
}

fn render_json(report: &RunReport) -> String {
    let causal = causal_failure_counts(report);
    let conformance = conformance_failure_counts(report);
    let card = &report.scorecard;
    let failure_log: Vec<serde_json::Value> = failing_records(report)
        .iter()
        .enumerate()
        .map(|(i, record)| {
            json!({
                "entry": log_entry_header(i + 1, &report.model, record),
                "messages": record.outcome.messages(),
            })
        })
        .collect();

    let document = json!({
        "header": report.header,
        "engine": report.engine,
        "model": report.model,
        "seed": report.seed,
        "suites": report.suites,
        "summary": {
            "causalPassed": card.causal_passed,
            "causalTotal": card.causal_total,
            "causalPercent": card.causal_percent(),
            "conformancePassed": card.conformance_passed,
            "conformanceTotal": card.conformance_total,
            "conformancePercent": card.conformance_percent(),
            "overallPercent": card.overall_percent(),
            "errored": report.errored.len(),
        },
        "causalFailures": causal,
        "conformanceFailures": conformance,
        "results": report.results,
        "failureLog": failure_log,
        "errored": report.errored,
    });
    serde_json::to_string_pretty(&document).expect("report serializes")
}
