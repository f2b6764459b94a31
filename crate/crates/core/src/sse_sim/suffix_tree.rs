//! Generalized suffix tree over encrypted strings: the searchable index of
//! the simulated scheme.
//!
//! Built by naive insertion of every suffix. Each string gets a private
//! terminator symbol so that a suffix which is also a prefix of another
//! suffix still ends in its own leaf; terminators never appear in reported
//! labels, initial paths, or leakage.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sse_sim::key::{CipherId, EncryptedString, Token};

pub type NodeId = usize;

const TERMINATOR_BASE: u32 = 1_000;

#[inline]
fn is_terminator(sym: u32) -> bool {
    sym >= TERMINATOR_BASE
}

/// A position where a node's path label occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub string: CipherId,
    pub start: usize,
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    seq: usize,
    start: usize,
    end: usize,
}

#[derive(Debug, Clone)]
pub struct Node {
    parent: Option<NodeId>,
    edge: Edge,
    /// Keyed by the first symbol of the child's edge.
    children: BTreeMap<u32, NodeId>,
    occurrences: Vec<Occurrence>,
    depth: usize,
}

#[derive(Debug, Clone)]
pub struct SuffixTree {
    seqs: Vec<Vec<u32>>,
    ids: Vec<CipherId>,
    nodes: Vec<Node>,
}

impl SuffixTree {
    pub const ROOT: NodeId = 0;

    pub fn build(strings: &[EncryptedString]) -> Self {
        let root = Node {
            parent: None,
            edge: Edge {
                seq: 0,
                start: 0,
                end: 0,
            },
            children: BTreeMap::new(),
            occurrences: Vec::new(),
            depth: 0,
        };
        let mut tree = Self {
            seqs: Vec::with_capacity(strings.len()),
            ids: Vec::with_capacity(strings.len()),
            nodes: vec![root],
        };
        for (i, es) in strings.iter().enumerate() {
            let mut seq: Vec<u32> = es.tokens.iter().map(|t| u32::from(t.0)).collect();
            seq.push(TERMINATOR_BASE + i as u32);
            tree.seqs.push(seq);
            tree.ids.push(es.id);
            for start in 0..es.tokens.len() {
                tree.insert_suffix(i, start);
            }
        }
        tree
    }

    fn sym(&self, seq: usize, pos: usize) -> u32 {
        self.seqs[seq][pos]
    }

    fn insert_suffix(&mut self, seq: usize, start: usize) {
        let occ = Occurrence {
            string: self.ids[seq],
            start,
        };
        let len = self.seqs[seq].len();
        let mut node = Self::ROOT;
        let mut i = start;
        loop {
            let first = self.sym(seq, i);
            let Some(&child) = self.nodes[node].children.get(&first) else {
                self.add_leaf(node, seq, i, occ);
                return;
            };
            let edge = self.nodes[child].edge;
            let mut k = 0;
            while edge.start + k < edge.end
                && i + k < len
                && self.sym(edge.seq, edge.start + k) == self.sym(seq, i + k)
            {
                k += 1;
            }
            if edge.start + k == edge.end {
                self.nodes[child].occurrences.push(occ);
                node = child;
                i += k;
                continue;
            }
            // Mismatch inside the edge. The unique terminator guarantees the
            // new suffix has not run out.
            debug_assert!(i + k < len);
            let mid = self.nodes.len();
            let mut occurrences = self.nodes[child].occurrences.clone();
            occurrences.push(occ);
            let split_sym = self.sym(edge.seq, edge.start + k);
            self.nodes.push(Node {
                parent: Some(node),
                edge: Edge {
                    seq: edge.seq,
                    start: edge.start,
                    end: edge.start + k,
                },
                children: BTreeMap::from([(split_sym, child)]),
                occurrences,
                depth: self.nodes[node].depth + k,
            });
            self.nodes[child].edge.start += k;
            self.nodes[child].parent = Some(mid);
            self.nodes[node].children.insert(first, mid);
            self.add_leaf(mid, seq, i + k, occ);
            return;
        }
    }

    fn add_leaf(&mut self, parent: NodeId, seq: usize, start: usize, occ: Occurrence) {
        let id = self.nodes.len();
        let end = self.seqs[seq].len();
        self.nodes.push(Node {
            parent: Some(parent),
            edge: Edge { seq, start, end },
            children: BTreeMap::new(),
            occurrences: vec![occ],
            depth: self.nodes[parent].depth + (end - start),
        });
        let first = self.sym(seq, start);
        self.nodes[parent].children.insert(first, id);
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        node != Self::ROOT && self.nodes[node].children.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&n| self.is_leaf(n))
    }

    /// Non-root, non-leaf nodes.
    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (1..self.nodes.len()).filter(|&n| !self.nodes[n].children.is_empty())
    }

    pub fn children(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes[node].children.values().copied()
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.nodes[node].parent
    }

    pub fn occurrences(&self, node: NodeId) -> &[Occurrence] {
        &self.nodes[node].occurrences
    }

    /// Edge label into `node`, terminator stripped.
    pub fn edge_label(&self, node: NodeId) -> Vec<Token> {
        let e = self.nodes[node].edge;
        self.seqs[e.seq][e.start..e.end]
            .iter()
            .take_while(|&&s| !is_terminator(s))
            .map(|&s| Token(s as u16))
            .collect()
    }

    /// Concatenated labels from the root down to `node`, terminator stripped.
    pub fn path_label(&self, node: NodeId) -> Vec<Token> {
        let mut chain = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(cur);
            cur = p;
        }
        chain
            .iter()
            .rev()
            .flat_map(|&n| self.edge_label(n))
            .collect()
    }

    /// The root-to-parent label followed by the first symbol of the leaf's
    /// own edge. Errors for non-leaf nodes.
    pub fn init_path(&self, leaf: NodeId) -> Result<Vec<Token>> {
        if leaf >= self.nodes.len() || !self.is_leaf(leaf) {
            return Err(Error::NotALeaf(leaf));
        }
        let parent = self.nodes[leaf].parent.expect("leaf has a parent");
        let mut path = self.path_label(parent);
        let e = self.nodes[leaf].edge;
        let first = self.sym(e.seq, e.start);
        if !is_terminator(first) {
            path.push(Token(first as u16));
        }
        Ok(path)
    }

    /// The leaf holding suffix `start` of the given string.
    pub fn leaf_for(&self, string: CipherId, start: usize) -> Option<NodeId> {
        let seq = self.ids.iter().position(|&id| id == string)?;
        let mut node = Self::ROOT;
        let mut i = start;
        let s = &self.seqs[seq];
        while i < s.len() {
            node = *self.nodes[node].children.get(&s[i])?;
            let e = self.nodes[node].edge;
            i += e.end - e.start;
        }
        self.is_leaf(node).then_some(node)
    }

    /// Node whose path label starts with `pattern` and is reached first when
    /// walking down, i.e. the locus of `pattern`; `None` if the pattern does
    /// not occur. Returns the root for the empty pattern.
    pub fn locate(&self, pattern: &[Token]) -> Option<NodeId> {
        self.walk(pattern).map(|(node, _)| node)
    }

    /// Nodes traversed while matching `pattern` from the root, excluding the
    /// root itself; the last entry is the locus.
    pub fn walk(&self, pattern: &[Token]) -> Option<(NodeId, Vec<NodeId>)> {
        let mut node = Self::ROOT;
        let mut visited = Vec::new();
        let mut i = 0;
        while i < pattern.len() {
            let child = *self.nodes[node].children.get(&u32::from(pattern[i].0))?;
            let e = self.nodes[child].edge;
            let label = &self.seqs[e.seq][e.start..e.end];
            for &sym in label {
                if i == pattern.len() {
                    break;
                }
                if sym != u32::from(pattern[i].0) {
                    return None;
                }
                i += 1;
            }
            visited.push(child);
            node = child;
        }
        Some((node, visited))
    }

    /// Leaves in the subtree rooted at `node`.
    pub fn leaves_below(&self, node: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if self.is_leaf(n) {
                out.push(n);
            } else {
                stack.extend(self.nodes[n].children.values().copied());
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks the four structural conditions, returning the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        // (i) leaf count per string equals its length
        let mut leaves_per = vec![0usize; self.seqs.len()];
        for leaf in self.leaves() {
            let e = self.nodes[leaf].edge;
            let last = self.seqs[e.seq][e.end - 1];
            if !is_terminator(last) {
                return Err(format!("leaf {leaf} does not end in a terminator"));
            }
            leaves_per[(last - TERMINATOR_BASE) as usize] += 1;
        }
        for (i, (&count, seq)) in leaves_per.iter().zip(&self.seqs).enumerate() {
            if count != seq.len() - 1 {
                return Err(format!(
                    "string {i} has {count} leaves but length {}",
                    seq.len() - 1
                ));
            }
        }
        for (id, node) in self.nodes.iter().enumerate() {
            // (ii) branching
            if id != Self::ROOT && !node.children.is_empty() && node.children.len() < 2 {
                return Err(format!("internal node {id} has a single child"));
            }
            // (iii) sibling edges start with distinct symbols, keyed correctly
            for (&first, &child) in &node.children {
                let e = self.nodes[child].edge;
                if e.start >= e.end || self.sym(e.seq, e.start) != first {
                    return Err(format!(
                        "child {child} of {id} is keyed by the wrong symbol"
                    ));
                }
            }
            // (iv) occurrence lists are consistent with the path label
            if id != Self::ROOT {
                let label = self.path_label(id);
                if node.occurrences.is_empty() {
                    return Err(format!("node {id} has no occurrences"));
                }
                for occ in &node.occurrences {
                    let Some(seq) = self.ids.iter().position(|&s| s == occ.string) else {
                        return Err(format!("node {id} cites unknown string {}", occ.string));
                    };
                    let s = &self.seqs[seq];
                    let fits = s.len() > occ.start + label.len()
                        && label
                            .iter()
                            .enumerate()
                            .all(|(k, t)| s[occ.start + k] == u32::from(t.0));
                    if !fits {
                        return Err(format!(
                            "node {id} occurrence ({}, {}) does not spell its label",
                            occ.string, occ.start
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Indented text dump for debugging. Terminators print as `$<string>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(Self::ROOT, 0usize)];
        while let Some((node, indent)) = stack.pop() {
            let n = &self.nodes[node];
            if node == Self::ROOT {
                out.push_str("root\n");
            } else {
                let e = n.edge;
                let label: Vec<String> = self.seqs[e.seq][e.start..e.end]
                    .iter()
                    .map(|&s| {
                        if is_terminator(s) {
                            format!("${}", self.ids[(s - TERMINATOR_BASE) as usize])
                        } else {
                            s.to_string()
                        }
                    })
                    .collect();
                let occ: Vec<String> = n
                    .occurrences
                    .iter()
                    .map(|o| format!("{}:{}", o.string, o.start))
                    .collect();
                let _ = writeln!(
                    out,
                    "{:indent$}N{node} [{}] {{{}}}",
                    "",
                    label.join(" "),
                    occ.join(","),
                    indent = indent * 2
                );
            }
            for &child in n.children.values().rev() {
                stack.push((child, indent + 1));
            }
        }
        out
    }
}

/// Builds the generalized suffix tree over `strings`.
pub fn build_suffix_tree(strings: &[EncryptedString]) -> SuffixTree {
    SuffixTree::build(strings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::sse_sim::key::{decrypt_tokens, encrypt_string, gen_key, TokenAlphabet};

    fn encrypt_all(words: &[&str], seed: u64) -> (Vec<EncryptedString>, TokenAlphabet) {
        let c = Corpus::from_strings(words.iter().copied()).unwrap();
        let key = gen_key(c.alphabet(), seed).unwrap();
        let es = c
            .strings()
            .iter()
            .map(|r| encrypt_string(r, &key).unwrap())
            .collect();
        (es, key)
    }

    #[test]
    fn hello_has_five_leaves() {
        let (es, _) = encrypt_all(&["hello"], 1);
        let tree = build_suffix_tree(&es);
        assert_eq!(tree.leaves().count(), 5);
        tree.check_invariants().unwrap();
    }

    #[test]
    fn aa_has_two_leaves() {
        let (es, key) = encrypt_all(&["aa"], 1);
        let tree = build_suffix_tree(&es);
        tree.check_invariants().unwrap();
        let mut suffixes: Vec<String> = tree
            .leaves()
            .map(|l| {
                let occ = tree.occurrences(l)[0];
                decrypt_tokens(&es[0].tokens[occ.start..], &key).unwrap()
            })
            .collect();
        suffixes.sort();
        assert_eq!(suffixes, ["a", "aa"]);
        // The leaf for suffix "a" hangs below the shared "a" node on a
        // terminator-only edge.
        let leaf = tree.leaf_for(es[0].id, 1).unwrap();
        assert_eq!(
            decrypt_tokens(&tree.init_path(leaf).unwrap(), &key).unwrap(),
            "a"
        );
    }

    #[test]
    fn hello_help_shape_and_initial_paths() {
        let (es, key) = encrypt_all(&["hello", "help"], 42);
        let tree = build_suffix_tree(&es);
        tree.check_invariants().unwrap();
        assert_eq!(tree.leaves().count(), 9);

        let root_children: Vec<String> = tree
            .children(SuffixTree::ROOT)
            .map(|c| decrypt_tokens(&tree.edge_label(c)[..1], &key).unwrap())
            .collect();
        let mut sorted = root_children.clone();
        sorted.sort();
        assert_eq!(sorted, ["e", "h", "l", "o", "p"]);

        // "llo" of hello and "lp" of help
        let n11 = tree.leaf_for(es[0].id, 2).unwrap();
        let n12 = tree.leaf_for(es[1].id, 2).unwrap();
        let decrypt = |leaf| decrypt_tokens(&tree.init_path(leaf).unwrap(), &key).unwrap();
        assert_eq!(decrypt(n11), "ll");
        assert_eq!(decrypt(n12), "lp");
        assert_eq!(tree.parent(n11), tree.parent(n12));
    }

    #[test]
    fn leaf_directly_below_root() {
        let (es, key) = encrypt_all(&["xyz"], 3);
        let tree = build_suffix_tree(&es);
        let leaf = tree.leaf_for(es[0].id, 0).unwrap();
        assert_eq!(tree.parent(leaf), Some(SuffixTree::ROOT));
        assert_eq!(
            decrypt_tokens(&tree.init_path(leaf).unwrap(), &key).unwrap(),
            "x"
        );
    }

    #[test]
    fn init_path_rejects_internal_nodes() {
        let (es, _) = encrypt_all(&["hello", "help"], 42);
        let tree = build_suffix_tree(&es);
        let internal = tree.internal_nodes().next().unwrap();
        assert!(matches!(tree.init_path(internal), Err(Error::NotALeaf(_))));
        assert!(matches!(
            tree.init_path(SuffixTree::ROOT),
            Err(Error::NotALeaf(0))
        ));
    }

    #[test]
    fn locate_finds_every_occurrence() {
        let (es, _) = encrypt_all(&["banana", "ananas"], 8);
        let tree = build_suffix_tree(&es);
        tree.check_invariants().unwrap();
        // "ana" occurs twice in banana and twice in ananas
        let ana = &es[0].tokens[1..4];
        let locus = tree.locate(ana).unwrap();
        assert_eq!(tree.occurrences(locus).len(), 4);
        assert_eq!(tree.leaves_below(locus).len(), 4);
        assert!(tree.locate(&[Token(1)]).is_none());
    }

    #[test]
    fn dump_mentions_terminators() {
        let (es, _) = encrypt_all(&["ab"], 1);
        let dump = build_suffix_tree(&es).dump();
        assert!(dump.starts_with("root\n"));
        assert!(dump.contains("$0"));
    }
}
