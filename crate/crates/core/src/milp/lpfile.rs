//! CPLEX-style LP file output.

use std::fmt::Write;

use super::{MilpModel, VarKind};

const TERMS_PER_LINE: usize = 8;

/// Maps a vertex label to an identifier: non-alphanumerics become `_`, runs
/// collapse and edge underscores are trimmed, so `(v1,v2)` becomes `v1_v2`.
pub fn sanitize(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for ch in label.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn push_terms(out: &mut String, model: &MilpModel, terms: &[(usize, i64)]) {
    for (k, &(v, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let name = &model.variables()[v].name;
        let sign = if c < 0 { "-" } else { "+" };
        let mag = c.unsigned_abs();
        match (k, c < 0, mag) {
            (0, false, 1) => write!(out, " {name}"),
            (0, false, _) => write!(out, " {mag} {name}"),
            (_, _, 1) => write!(out, " {sign} {name}"),
            _ => write!(out, " {sign} {mag} {name}"),
        }
        .expect("writing to a String");
    }
}

/// Renders the model. The output depends only on the model, so two builds
/// with the same inputs produce identical files.
pub fn emit_lp(model: &MilpModel) -> String {
    let p = model.params();
    let g = model.graph();
    let mut out = String::new();
    writeln!(
        out,
        "\\ {} model for graph {} root {}: T = {}, ell = {}, {} blocks",
        p.variant,
        g.name(),
        g.label(model.root()),
        p.t,
        p.ell,
        p.blocks()
    )
    .unwrap();
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, model, model.objective());
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        write!(out, " {}:", c.name).unwrap();
        push_terms(&mut out, model, &c.terms);
        writeln!(out, " {} {}", c.sense.symbol(), c.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for v in model.variables().iter().filter(|v| v.kind == VarKind::Continuous) {
        writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper).unwrap();
    }
    out.push_str("Binaries\n");
    let binaries: Vec<&str> =
        model.variables().iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    for chunk in binaries.chunks(TERMS_PER_LINE) {
        writeln!(out, " {}", chunk.join(" ")).unwrap();
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::catalog::catalog;
    use crate::graph::Graph;
    use crate::milp::{build_ts_model, ModelParams, Variant};

    #[test]
    fn sanitize_labels() {
        assert_eq!(sanitize("(v1,v2)"), "v1_v2");
        assert_eq!(sanitize("a--b"), "a_b");
        assert_eq!(sanitize("b0101"), "b0101");
        assert_eq!(sanitize("(,)"), "");
    }

    #[test]
    fn k2_file() {
        let g = Arc::new(Graph::new::<&str, &str, _, _>("k2", ["r", "a"], [("r", "a")]).unwrap());
        let m = build_ts_model(g, 0, ModelParams::new(1, 1, Variant::Ts).unwrap()).unwrap();
        let expected = "\\ TS model for graph k2 root r: T = 1, ell = 1, 1 blocks
Minimize
 obj: z_1_r + z_1_a
Subject To
 indeg_1_r: x_1_a_r - y_1_r = 0
 indeg_1_a: x_1_r_a - y_1_a = 0
 rootchild_1: y_1_a >= 1
 link_1_r: z_1_r - y_1_r <= 0
 link_1_a: z_1_a - y_1_a <= 0
 noroot_1: y_1_r = 0
 cover_a: z_1_a >= 1
Bounds
 0 <= z_1_r <= 1
 0 <= z_1_a <= 1
Binaries
 x_1_r_a x_1_a_r y_1_r y_1_a
End
";
        assert_eq!(emit_lp(&m), expected);
    }

    #[test]
    fn big_m_constant_and_determinism() {
        let g = Arc::new(catalog("path_3").unwrap());
        let p = ModelParams::new(2, 4, Variant::Ts).unwrap();
        let a = emit_lp(&build_ts_model(g.clone(), 0, p).unwrap());
        let b = emit_lp(&build_ts_model(g, 0, p).unwrap());
        assert_eq!(a, b);
        assert!(a.contains(" double_1_v2_v3: z_1_v2 - 2 z_1_v3 - 16 x_1_v2_v3 >= -16\n"));
        assert!(a.contains(" link_2_v3: z_2_v3 - 8 y_2_v3 <= 0\n"));
        assert!(a.contains(" cover_v3: z_1_v3 + z_2_v3 >= 2\n"));
    }
}
