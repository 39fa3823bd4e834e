//! Emission of graphs, tables and plots: GraphML, DOT, CSV/JSON reports and
//! SVG network renderings. All outputs are byte-stable: sorted emission
//! order, fixed float formatting, explicit seeds.

mod dot;
mod graphml;
mod layout;
mod report;
mod svg;

pub use dot::{export_dot, import_dot};
pub use graphml::{export_graphml, import_graphml, ExportAttributes};
pub use layout::{layout_force, LayoutResult, DEFAULT_ITERATIONS};
pub use report::{
    community_json, curves_csv, kappa_json, kappa_text, report_csv, report_json, summary_text,
};
pub use svg::{render_svg, RenderOptions};

/// Fixed 12-color fill palette; community ids cycle through it.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

/// Format with the given number of significant digits, plain decimal
/// notation. The decade is found by repeated scaling rather than log10 so
/// the output is identical on every platform.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let mut v = x.abs();
    let mut exp = 0i32;
    while v >= 10.0 {
        v /= 10.0;
        exp += 1;
    }
    while v < 1.0 {
        v *= 10.0;
        exp -= 1;
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub(crate) fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub(crate) fn xml_unescape(s: &str) -> String {
    s.replace("&quot;", "\"")
        .replace("&gt;", ">")
        .replace("&lt;", "<")
        .replace("&amp;", "&")
}
