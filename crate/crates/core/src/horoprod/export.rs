use std::fmt::Write;

use super::HoroWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeList,
    VertexTable,
    Dot,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edges" | "edge-list" => Ok(ExportFormat::EdgeList),
            "vertices" | "vertex-table" => Ok(ExportFormat::VertexTable),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

impl HoroWindow {
    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::EdgeList => edge_list(self),
            ExportFormat::VertexTable => vertex_table(self),
            ExportFormat::Dot => dot(self),
        }
    }
}

/// `# horoprod-window/1 H=<H> n=<vertices> m=<edges>` then one `u v` line
/// per edge, `u < v`, sorted.
pub fn edge_list(w: &HoroWindow) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# horoprod-window/1 H={} n={} m={}",
        w.height(),
        w.len(),
        w.edge_count()
    )
    .unwrap();
    for u in 0..w.len() as u32 {
        for &v in w.neighbors(u) {
            if u < v {
                writeln!(out, "{u} {v}").unwrap();
            }
        }
    }
    out
}

pub fn vertex_table(w: &HoroWindow) -> String {
    let mut out = String::from("# id level left_addr right_addr interior\n");
    for id in 0..w.len() as u32 {
        let v = w.vertex(id);
        writeln!(
            out,
            "{id} {} {} {} {}",
            v.level,
            w.left().tree().address(v.left),
            w.right().tree().address(v.right),
            u8::from(w.is_interior(id))
        )
        .unwrap();
    }
    out
}

/// Graphviz rendering with one rank per level, highest level on top.
pub fn dot(w: &HoroWindow) -> String {
    let mut out = String::from("graph horoprod {\n  rankdir=TB;\n  node [shape=point];\n");
    let h = i64::from(w.height());
    for level in (-h..=h).rev() {
        let ids: Vec<String> = (0..w.len() as u32)
            .filter(|&id| w.vertex(id).level == level)
            .map(|id| format!("v{id}"))
            .collect();
        if !ids.is_empty() {
            writeln!(out, "  {{ rank=same; {}; }}", ids.join("; ")).unwrap();
        }
    }
    writeln!(out, "  v0 [shape=circle, label=\"o\"];").unwrap();
    for u in 0..w.len() as u32 {
        for &v in w.neighbors(u) {
            if u < v {
                writeln!(out, "  v{u} -- v{v};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
