//! Per-article heading tree.
//!
//! The root holds the article title and lead text. Every section becomes a node attached
//! below the nearest preceding section with a shallower heading level, so level-skipping
//! headings (a level 4 directly under a level 2) hang off the closest shallower ancestor.
//! Node ids are assigned in document order, which is also preorder.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::parse::Section;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WstNode {
    pub node_id: NodeId,
    pub title: String,
    /// Text directly under this heading, before any child heading.
    pub content: String,
    /// Root depth is 1, so a node's path has exactly `depth` titles.
    pub depth: usize,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wst {
    pub article_id: u64,
    nodes: Vec<WstNode>,
}

pub const ROOT: NodeId = 0;

/// Build the heading tree for one article.
pub fn build_wst(article_id: u64, title: &str, abstract_text: &str, sections: &[Section]) -> Wst {
    let mut nodes = vec![WstNode {
        node_id: ROOT,
        title: title.to_owned(),
        content: abstract_text.to_owned(),
        depth: 1,
        parent: None,
        children: Vec::new(),
    }];
    // (heading level, node); the root sits below every real level and is never popped.
    let mut stack: Vec<(u8, NodeId)> = vec![(0, ROOT)];
    for section in sections {
        while stack.len() > 1 && stack.last().is_some_and(|&(level, _)| level >= section.level) {
            stack.pop();
        }
        let parent = stack.last().expect("root stays on the stack").1;
        let id = nodes.len();
        nodes.push(WstNode {
            node_id: id,
            title: section.heading.clone(),
            content: section.body.clone(),
            depth: nodes[parent].depth + 1,
            parent: Some(parent),
            children: Vec::new(),
        });
        nodes[parent].children.push(id);
        stack.push((section.level, id));
    }
    Wst { article_id, nodes }
}

impl Wst {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[WstNode] {
        &self.nodes
    }

    pub fn root(&self) -> &WstNode {
        &self.nodes[ROOT]
    }

    pub fn title(&self) -> &str {
        &self.nodes[ROOT].title
    }

    pub fn node(&self, id: NodeId) -> Result<&WstNode> {
        self.nodes.get(id).ok_or(Error::UnknownNode(id))
    }

    /// Parent of each node, `None` for the root.
    pub fn parent_array(&self) -> Vec<Option<NodeId>> {
        self.nodes.iter().map(|n| n.parent).collect()
    }

    /// Node ids from the root down to `id`, inclusive.
    pub fn path(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let mut path = vec![self.node(id)?.node_id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Titles from the root down to `id`, root title first.
    pub fn path_titles(&self, id: NodeId) -> Result<Vec<&str>> {
        Ok(self.path(id)?.into_iter().map(|n| self.nodes[n].title.as_str()).collect())
    }

    /// Preorder ids of `id` and all its descendants.
    pub fn subtree(&self, id: NodeId) -> Result<Vec<NodeId>> {
        self.node(id)?;
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        Ok(out)
    }

    /// Contents of `id` and its descendants in preorder, newline separated. Empty contents
    /// are skipped so they do not leave blank lines.
    pub fn subtree_text(&self, id: NodeId) -> Result<String> {
        let mut out = String::new();
        for n in self.subtree(id)? {
            let content = &self.nodes[n].content;
            if content.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(content);
        }
        Ok(out)
    }

    /// Indented one-line-per-node rendering: `depth<TAB>title<TAB>content word count`.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for n in self.subtree(ROOT).expect("root exists") {
            let node = &self.nodes[n];
            let words = node.content.split_whitespace().count();
            let _ = writeln!(out, "{}{}\t{}\t{}", "  ".repeat(node.depth - 1), node.depth, node.title, words);
        }
        out
    }
}
