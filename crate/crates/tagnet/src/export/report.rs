//! Tabular and textual report emission: centrality CSV/JSON, community
//! JSON/summary text, agreement JSON/text and cumulative curve CSV.

use serde_json::json;

use crate::agreement::{kappa_band, ConfusionMatrix, CumulativeCurves, KappaResult};
use crate::centrality::CentralityReport;
use crate::community::{CommunityPartition, CommunitySummary};

use super::format_sig;

/// Centrality table as CSV: header `tag,<measure1>,...`, scores with the
/// given number of significant digits.
pub fn report_csv(report: &CentralityReport, sig: usize) -> String {
    let mut out = String::from("tag");
    for m in &report.measures {
        out.push(',');
        out.push_str(&m.to_string());
    }
    out.push('\n');
    for (tag, scores) in &report.rows {
        out.push_str(tag);
        for &s in scores {
            out.push(',');
            out.push_str(&format_sig(s, sig));
        }
        out.push('\n');
    }
    out
}

/// Centrality table as JSON: an array of row objects, order preserved.
pub fn report_json(report: &CentralityReport, sig: usize) -> String {
    let rows: Vec<serde_json::Value> = report
        .rows
        .iter()
        .map(|(tag, scores)| {
            let mut obj = serde_json::Map::new();
            obj.insert("tag".into(), json!(tag));
            for (m, &s) in report.measures.iter().zip(scores) {
                obj.insert(m.to_string(), json!(format_sig(s, sig)));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("report serialization") + "\n"
}

/// Partition as JSON: modularity plus the tag → community id map.
pub fn community_json(partition: &CommunityPartition, sig: usize) -> String {
    let value = json!({
        "q": format_sig(partition.q, sig),
        "community_count": partition.community_count(),
        "assignment": partition.assignment,
    });
    serde_json::to_string_pretty(&value).expect("partition serialization") + "\n"
}

/// Human-readable community listing: sizes, modularity and top tags.
pub fn summary_text(
    partition: &CommunityPartition,
    summaries: &[CommunitySummary],
    sig: usize,
) -> String {
    let mut out = format!(
        "{} communities, modularity Q = {}\n",
        partition.community_count(),
        format_sig(partition.q, sig)
    );
    for s in summaries {
        let tags: Vec<String> = s
            .top_tags
            .iter()
            .map(|(t, score)| format!("{t} ({})", format_sig(*score, sig)))
            .collect();
        out.push_str(&format!(
            "community {} ({} tags): {}\n",
            s.id,
            s.size,
            tags.join(", ")
        ));
    }
    out
}

/// Agreement results as JSON, confusion matrix included.
pub fn kappa_json(result: &KappaResult, matrix: &ConfusionMatrix, sig: usize) -> String {
    let value = json!({
        "n": result.n,
        "kappa": format_sig(result.kappa, sig),
        "observed_agreement": format_sig(result.observed_agreement, sig),
        "expected_agreement": format_sig(result.expected_agreement, sig),
        "degenerate": result.degenerate,
        "band": kappa_band(result.kappa),
        "confusion_matrix": {
            "class_ids": matrix.class_ids,
            "counts": matrix.counts,
        },
    });
    serde_json::to_string_pretty(&value).expect("kappa serialization") + "\n"
}

/// Agreement results as human-readable text, with the descriptive band.
pub fn kappa_text(result: &KappaResult, sig: usize) -> String {
    let mut out = format!(
        "items rated: {}\npercent agreement: {}%\nCohen's kappa: {} ({})\n",
        result.n,
        format_sig(100.0 * result.observed_agreement, sig),
        format_sig(result.kappa, sig),
        kappa_band(result.kappa)
    );
    if result.degenerate {
        out.push_str("note: expected agreement is 1; kappa is degenerate\n");
    }
    out
}

/// Cumulative curves as CSV: header `batch,class_<id>,...`, one row per
/// batch with cumulative percentages.
pub fn curves_csv(curves: &CumulativeCurves, sig: usize) -> String {
    let mut out = String::from("batch");
    for id in &curves.class_ids {
        out.push_str(&format!(",class_{id}"));
    }
    out.push('\n');
    let len = curves.series.first().map_or(0, |s| s.len());
    for t in 0..len {
        out.push_str(&t.to_string());
        for s in &curves.series {
            out.push(',');
            out.push_str(&format_sig(s[t], sig));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::agreement::cohens_kappa;
    use crate::centrality::{centrality_report, degree, Measure};
    use crate::community::{best_partition, community_summary, fast_greedy};
    use crate::graph::test_support::graph_from_edges;

    fn two_triangles() -> crate::graph::CooccurrenceGraph {
        graph_from_edges(&[
            ("a", "b", 1),
            ("b", "c", 1),
            ("a", "c", 1),
            ("c", "d", 1),
            ("d", "e", 1),
            ("e", "f", 1),
            ("d", "f", 1),
        ])
    }

    #[test]
    fn csv_has_header_and_one_row_per_vertex() {
        let g = graph_from_edges(&[("a", "b", 2), ("b", "c", 1)]);
        let measures: BTreeSet<Measure> =
            [Measure::Degree, Measure::WeightedDegree].into_iter().collect();
        let report = centrality_report(&g, &measures).unwrap();
        let csv = report_csv(&report, 6);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tag,degree,weighted_degree");
        assert_eq!(lines.len(), 4);
        assert!(lines.contains(&"b,2.00000,3.00000"));
    }

    #[test]
    fn json_rows_carry_all_measures() {
        let g = graph_from_edges(&[("a", "b", 1)]);
        let measures: BTreeSet<Measure> = [Measure::Degree].into_iter().collect();
        let report = centrality_report(&g, &measures).unwrap();
        let parsed: Vec<serde_json::Value> =
            serde_json::from_str(&report_json(&report, 6)).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0]["tag"], "a");
        assert_eq!(parsed[0]["degree"], "1.00000");
    }

    #[test]
    fn community_json_round_trips() {
        let part = best_partition(&fast_greedy(&two_triangles()).unwrap());
        let parsed: serde_json::Value =
            serde_json::from_str(&community_json(&part, 6)).unwrap();
        assert_eq!(parsed["community_count"], 2);
        assert_eq!(parsed["q"], "0.357143");
        assert_eq!(parsed["assignment"]["a"], parsed["assignment"]["b"]);
        assert_ne!(parsed["assignment"]["a"], parsed["assignment"]["d"]);
    }

    #[test]
    fn summary_text_lists_communities_with_top_tags() {
        let g = two_triangles();
        let part = best_partition(&fast_greedy(&g).unwrap());
        let deg = degree(&g, false);
        let summaries = community_summary(&part, &deg, 2).unwrap();
        let text = summary_text(&part, &summaries, 6);
        assert!(text.starts_with("2 communities, modularity Q = 0.357143"));
        assert!(text.contains("community 0 (3 tags): c (3.00000)"));
    }

    #[test]
    fn kappa_text_includes_band() {
        let m = ConfusionMatrix::from_counts(vec![1, 2], vec![vec![20, 5], vec![10, 15]]);
        let k = cohens_kappa(&m).unwrap();
        let text = kappa_text(&k, 6);
        let band = crate::agreement::kappa_band(k.kappa);
        assert!(text.contains(&format!("Cohen's kappa: 0.400000 ({band})")));
        assert!(text.contains("percent agreement: 70.0000%"));
        let parsed: serde_json::Value = serde_json::from_str(&kappa_json(&k, &m, 6)).unwrap();
        assert_eq!(parsed["kappa"], "0.400000");
        assert_eq!(parsed["band"], band);
        assert_eq!(parsed["confusion_matrix"]["counts"][0][0], 20);
    }

    #[test]
    fn curves_csv_has_one_row_per_batch() {
        let curves = CumulativeCurves {
            class_ids: vec![1, 2],
            series: vec![vec![50.0, 60.0], vec![50.0, 40.0]],
        };
        let csv = curves_csv(&curves, 6);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, vec!["batch,class_1,class_2", "0,50.0000,50.0000", "1,60.0000,40.0000"]);
    }
}
