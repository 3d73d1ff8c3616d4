use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::samplers::PseudoInstance;

pub fn instance_line(instance: &PseudoInstance) -> Result<String> {
    let mut line = serde_json::to_string(instance)?;
    line.push('\n');
    Ok(line)
}

/// Write one JSON line per instance, ordered by article id (stable, so instances of one
/// article keep their emission order). Returns the number of lines written.
pub fn write_instances<W: Write>(instances: &[PseudoInstance], sink: &mut W) -> Result<usize> {
    let mut order: Vec<&PseudoInstance> = instances.iter().collect();
    order.sort_by_key(|i| i.article_id);
    for inst in &order {
        sink.write_all(instance_line(inst)?.as_bytes())?;
    }
    sink.flush()?;
    Ok(order.len())
}

/// [`write_instances`] into a file; a partially written file is removed on failure.
pub fn write_instances_to_path(instances: &[PseudoInstance], path: &Path) -> Result<usize> {
    let file = File::create(path).map_err(Error::at_path(path))?;
    let mut sink = BufWriter::new(file);
    match write_instances(instances, &mut sink).and_then(|n| {
        sink.flush()?;
        Ok(n)
    }) {
        Ok(n) => Ok(n),
        Err(e) => {
            drop(sink);
            let _ = fs::remove_file(path);
            Err(e)
        }
    }
}

pub fn read_instances(text: &str) -> Result<Vec<PseudoInstance>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSummary {
    pub lines: u64,
    pub sha256: String,
}

struct Block {
    article_id: u64,
    seq: u64,
    offset: u64,
    len: u64,
    lines: u64,
}

/// Unordered staging area for one task's output. Blocks (all lines of one article) are
/// appended as they arrive and written out in article-id order by [`TaskSpool::finish`].
pub struct TaskSpool {
    file: File,
    len: u64,
    blocks: Vec<Block>,
    lines: u64,
    max_article: Option<u64>,
}

impl TaskSpool {
    pub fn new(dir: &Path) -> Result<Self> {
        Ok(Self { file: tempfile::tempfile_in(dir)?, len: 0, blocks: Vec::new(), lines: 0, max_article: None })
    }

    pub fn lines(&self) -> u64 {
        self.lines
    }

    /// True when `cap` lines from articles with smaller ids than `article_id` are already
    /// staged, so nothing from `article_id` can make it into the capped output.
    pub fn saturated_before(&self, article_id: u64, cap: Option<u64>) -> bool {
        match (cap, self.max_article) {
            (Some(cap), Some(max)) => self.lines >= cap && max < article_id,
            _ => false,
        }
    }

    pub fn push(&mut self, article_id: u64, instances: &[PseudoInstance]) -> Result<()> {
        if instances.is_empty() {
            return Ok(());
        }
        let mut buf = String::new();
        for inst in instances {
            buf.push_str(&instance_line(inst)?);
        }
        self.file.write_all(buf.as_bytes())?;
        self.blocks.push(Block {
            article_id,
            seq: self.blocks.len() as u64,
            offset: self.len,
            len: buf.len() as u64,
            lines: instances.len() as u64,
        });
        self.len += buf.len() as u64;
        self.lines += instances.len() as u64;
        self.max_article = Some(self.max_article.map_or(article_id, |m| m.max(article_id)));
        Ok(())
    }

    /// Write staged lines to `path` in ascending article order, keeping at most `cap` lines.
    pub fn finish(mut self, path: &Path, cap: Option<u64>) -> Result<OutputSummary> {
        let tmp = partial_path(path);
        let result = self.copy_sorted(&tmp, cap);
        match result {
            Ok(summary) => {
                fs::rename(&tmp, path).map_err(Error::at_path(path))?;
                Ok(summary)
            }
            Err(e) => {
                let _ = fs::remove_file(&tmp);
                Err(e)
            }
        }
    }

    fn copy_sorted(&mut self, dest: &Path, cap: Option<u64>) -> Result<OutputSummary> {
        self.blocks.sort_by_key(|b| (b.article_id, b.seq));
        let mut out = BufWriter::new(File::create(dest).map_err(Error::at_path(dest))?);
        let mut hasher = Sha256::new();
        let mut written = 0u64;
        let limit = cap.unwrap_or(u64::MAX);
        let mut buf = Vec::new();
        for block in &self.blocks {
            if written >= limit {
                break;
            }
            buf.resize(block.len as usize, 0);
            self.file.seek(SeekFrom::Start(block.offset))?;
            self.file.read_exact(&mut buf)?;
            let take = block.lines.min(limit - written);
            let bytes = if take == block.lines { &buf[..] } else { prefix_lines(&buf, take as usize) };
            out.write_all(bytes)?;
            hasher.update(bytes);
            written += take;
        }
        out.flush()?;
        Ok(OutputSummary { lines: written, sha256: hex::encode(hasher.finalize()) })
    }
}

fn prefix_lines(buf: &[u8], n: usize) -> &[u8] {
    let mut seen = 0;
    for (i, &b) in buf.iter().enumerate() {
        if b == b'\n' {
            seen += 1;
            if seen == n {
                return &buf[..=i];
            }
        }
    }
    buf
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// SHA-256 and line count of a file on disk.
pub fn summarize_file(path: &Path) -> io::Result<OutputSummary> {
    let bytes = fs::read(path)?;
    let lines = bytes.iter().filter(|&&b| b == b'\n').count() as u64;
    Ok(OutputSummary { lines, sha256: hex::encode(Sha256::digest(&bytes)) })
}
