//! Node labels of the encoded syntax tree.

use serde::Serialize;

use super::graph::EncodeGraph;

/// Roles and concept names are indices into an [`EncodeGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    Top,
    Bot,
    Not,
    And,
    Or,
    Name(u32),
    Exists(u32),
    Forall(u32),
    AtLeast(u32, u32),
    AtMost(u32, u32),
    Unused,
}

impl Label {
    pub fn arity(self) -> usize {
        match self {
            Label::Top | Label::Bot | Label::Name(_) | Label::Unused => 0,
            Label::Not | Label::Exists(_) | Label::Forall(_) | Label::AtLeast(..) | Label::AtMost(..) => 1,
            Label::And | Label::Or => 2,
        }
    }

    pub fn describe(self, g: &EncodeGraph) -> String {
        match self {
            Label::Top => "top".into(),
            Label::Bot => "bot".into(),
            Label::Not => "not".into(),
            Label::And => "and".into(),
            Label::Or => "or".into(),
            Label::Name(a) => g.concepts[a as usize].0.to_string(),
            Label::Exists(r) => format!("exists {}", g.roles[r as usize]),
            Label::Forall(r) => format!("forall {}", g.roles[r as usize]),
            Label::AtLeast(n, r) => format!("atleast {n} {}", g.roles[r as usize]),
            Label::AtMost(n, r) => format!("atmost {n} {}", g.roles[r as usize]),
            Label::Unused => "unused".into(),
        }
    }
}

/// Admissible labels for a graph and a number bound `g`.
///
/// `atleast 1` is left out since it coincides with `exists`. Without
/// qualified restrictions only the `exists`/`forall` forms are present.
pub fn label_set(graph: &EncodeGraph, qualified: bool, g: u32) -> Vec<Label> {
    let mut out = vec![Label::Top, Label::Bot, Label::Not, Label::And, Label::Or];
    out.extend((0..graph.concepts.len() as u32).map(Label::Name));
    for r in 0..graph.roles.len() as u32 {
        out.push(Label::Exists(r));
        out.push(Label::Forall(r));
        if qualified {
            out.extend((2..=g).map(|n| Label::AtLeast(n, r)));
            out.extend((0..=g).map(|n| Label::AtMost(n, r)));
        }
    }
    out.push(Label::Unused);
    out
}
