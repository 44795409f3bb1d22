//! File formats: graph JSON and DOT, matrix TSV, report JSON and HTML.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use aksara_core::{ComparisonReport, ReuseTree, SimilarityMatrix, Span};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Dot,
}

impl GraphFormat {
    /// `.dot` / `.gv` select DOT, `.json` selects JSON.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "json" => Some(GraphFormat::Json),
            "dot" | "gv" => Some(GraphFormat::Dot),
            _ => None,
        }
    }

    pub fn render(self, tree: &ReuseTree) -> String {
        match self {
            GraphFormat::Json => tree_json(tree),
            GraphFormat::Dot => tree_dot(tree),
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(GraphFormat::Json),
            "dot" => Ok(GraphFormat::Dot),
            other => Err(Error::UnknownFormat(other.into())),
        }
    }
}

pub fn tree_json(tree: &ReuseTree) -> String {
    let mut out = serde_json::to_string_pretty(tree).expect("tree serializes");
    out.push('\n');
    out
}

/// Parses a tree written by [`tree_json`] and checks that it spans its nodes.
pub fn tree_from_json(raw: &str) -> Result<ReuseTree> {
    let tree: ReuseTree =
        serde_json::from_str(raw).map_err(|e| Error::GraphImport(e.to_string()))?;
    if !tree.is_spanning_tree() {
        return Err(Error::GraphImport(
            "edges do not form a spanning tree over the nodes".into(),
        ));
    }
    Ok(tree)
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn tree_dot(tree: &ReuseTree) -> String {
    let mut out = String::from("graph reuse {\n");
    writeln!(
        out,
        "  graph [metric={}, params={}];",
        dot_quote(tree.metric.name()),
        dot_quote(&tree.params.to_string())
    )
    .unwrap();
    for node in &tree.nodes {
        write!(
            out,
            "  {} [label={}",
            dot_quote(&node.id),
            dot_quote(&node.label)
        )
        .unwrap();
        if let Some(language) = &node.language {
            write!(out, ", language={}", dot_quote(language)).unwrap();
        }
        if let Some(group) = &node.group {
            write!(out, ", group={}", dot_quote(group)).unwrap();
        }
        out.push_str("];\n");
    }
    for edge in &tree.edges {
        writeln!(
            out,
            "  {} -- {} [weight={:.6}, similarity={:.6}];",
            dot_quote(&edge.a),
            dot_quote(&edge.b),
            edge.weight,
            edge.similarity
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Header row of ids after an empty cell, then one row per document.
pub fn matrix_tsv(matrix: &SimilarityMatrix) -> String {
    let mut out = String::new();
    for id in &matrix.document_ids {
        out.push('\t');
        out.push_str(id);
    }
    out.push('\n');
    for (i, id) in matrix.document_ids.iter().enumerate() {
        out.push_str(id);
        for value in matrix.row(i) {
            write!(out, "\t{value:.6}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn fixed6(value: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{value:.6}")).expect("finite number")
}

/// A report with `jaccard` and `dice` added as six-decimal numbers.
#[derive(Serialize)]
pub struct ReportDocument<'a> {
    #[serde(flatten)]
    report: &'a ComparisonReport,
    jaccard: Box<RawValue>,
    dice: Box<RawValue>,
}

impl<'a> ReportDocument<'a> {
    pub fn new(report: &'a ComparisonReport) -> Self {
        ReportDocument {
            report,
            jaccard: fixed6(report.jaccard()),
            dice: fixed6(report.dice()),
        }
    }
}

pub fn report_json(report: &ComparisonReport) -> String {
    let mut out =
        serde_json::to_string_pretty(&ReportDocument::new(report)).expect("report serializes");
    out.push('\n');
    out
}

fn escape_html(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
}

fn highlighted(text: &str, ranges: &[Span]) -> String {
    let mut out = String::new();
    let mut at = 0;
    for r in ranges {
        escape_html(&text[at..r.start], &mut out);
        out.push_str("<mark>");
        escape_html(&text[r.start..r.end], &mut out);
        out.push_str("</mark>");
        at = r.end;
    }
    escape_html(&text[at..], &mut out);
    out
}

/// Standalone two-column page with merged matches marked.
pub fn report_html(report: &ComparisonReport, text_a: &str, text_b: &str) -> String {
    let mut title = String::new();
    escape_html(&format!("{} / {}", report.doc_a, report.doc_b), &mut title);
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    writeln!(out, "<title>{title}</title>").unwrap();
    out.push_str(concat!(
        "<style>\n",
        "body { font-family: serif; margin: 2em; }\n",
        ".panes { display: flex; gap: 2em; }\n",
        ".pane { flex: 1; white-space: pre-wrap; }\n",
        ".counts span { margin-right: 1.5em; }\n",
        "mark { background: #ffe08a; }\n",
        "</style>\n</head>\n<body>\n"
    ));
    writeln!(out, "<h1>{title}</h1>").unwrap();
    let mut params = String::new();
    escape_html(
        &format!("{}; normalize={}", report.params, report.profile),
        &mut params,
    );
    writeln!(
        out,
        "<p class=\"summary\">{params}; jaccard {:.6}; dice {:.6}</p>",
        report.jaccard(),
        report.dice()
    )
    .unwrap();
    out.push_str("<p class=\"counts\">");
    for (n, count) in &report.counts_by_n {
        write!(out, "<span>{n}-akṣaras: {count}</span>").unwrap();
    }
    out.push_str("</p>\n<div class=\"panes\">\n");
    for (id, text, ranges) in [
        (&report.doc_a, text_a, &report.merged_a),
        (&report.doc_b, text_b, &report.merged_b),
    ] {
        let mut heading = String::new();
        escape_html(id, &mut heading);
        writeln!(
            out,
            "<div class=\"pane\"><h2>{heading}</h2>{}</div>",
            highlighted(text, ranges)
        )
        .unwrap();
    }
    out.push_str("</div>\n</body>\n</html>\n");
    out
}
