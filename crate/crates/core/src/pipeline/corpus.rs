use std::borrow::Cow;
use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::Mutex;

use crate::error::Result;
use crate::samplers::CorpusText;

enum Slot {
    Memory(String),
    Disk { offset: u64, len: usize },
}

/// Article id → full cleaned text. Texts are kept in memory until their total size passes
/// `memory_limit` bytes; everything added after that goes to an anonymous temp file.
pub struct CorpusStore {
    slots: HashMap<u64, Slot>,
    memory_limit: usize,
    in_memory: usize,
    spill: Option<Mutex<File>>,
    spill_len: u64,
    spill_dir: std::path::PathBuf,
}

impl CorpusStore {
    pub fn new(spill_dir: &Path, memory_limit: usize) -> Self {
        Self {
            slots: HashMap::new(),
            memory_limit,
            in_memory: 0,
            spill: None,
            spill_len: 0,
            spill_dir: spill_dir.to_owned(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn spilled(&self) -> bool {
        self.spill.is_some()
    }

    pub fn insert(&mut self, article_id: u64, text: String) -> Result<()> {
        if self.in_memory + text.len() <= self.memory_limit {
            self.in_memory += text.len();
            self.slots.insert(article_id, Slot::Memory(text));
            return Ok(());
        }
        if self.spill.is_none() {
            self.spill = Some(Mutex::new(tempfile::tempfile_in(&self.spill_dir)?));
        }
        let file = self.spill.as_mut().expect("created above").get_mut().expect("not shared while inserting");
        file.seek(SeekFrom::Start(self.spill_len))?;
        file.write_all(text.as_bytes())?;
        self.slots.insert(article_id, Slot::Disk { offset: self.spill_len, len: text.len() });
        self.spill_len += text.len() as u64;
        Ok(())
    }
}

impl CorpusText for CorpusStore {
    fn text(&self, article_id: u64) -> Result<Option<Cow<'_, str>>> {
        match self.slots.get(&article_id) {
            None => Ok(None),
            Some(Slot::Memory(s)) => Ok(Some(Cow::Borrowed(s))),
            Some(Slot::Disk { offset, len }) => {
                let mut file = self.spill.as_ref().expect("disk slot implies spill file").lock().expect("poisoned");
                file.seek(SeekFrom::Start(*offset))?;
                let mut buf = vec![0; *len];
                file.read_exact(&mut buf)?;
                let text =
                    String::from_utf8(buf).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
                Ok(Some(Cow::Owned(text)))
            }
        }
    }
}
