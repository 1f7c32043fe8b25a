use alloc::string::String;
use alloc::vec::Vec;

use core::fmt;

use super::Node;

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// Canonical text: every gate is parenthesized; leaves come first in name
/// order, then gates in order of their own text.
///
/// Storage order (by canonical hash) is not used here because it is
/// meaningless to a reader; the printed order is still a pure function of
/// the canonical form.
pub(super) fn print(node: &Node) -> String {
    match node.gate_kind() {
        None => String::from(&**node.attribute().expect("leaf")),
        Some(gate) => {
            let mut parts: Vec<(bool, String)> = node.children().iter().map(|c| (!c.is_leaf(), print(c))).collect();
            parts.sort();
            let sep = match gate.symbol() {
                "&" => " & ",
                _ => " | ",
            };
            let mut out = String::with_capacity(node.cost() * 6);
            out.push('(');
            for (i, (_, text)) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                out.push_str(text);
            }
            out.push(')');
            out
        }
    }
}
