//! The on-disk store: a directory of UCI package files, single-writer with
//! an advisory lock file and atomic temp-file-then-rename commits.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use super::{
    is_writable_value, parse_uci, serialize_uci, EntryKind, FlatKind, FlattenedEntry,
    UciDocument, UciEntry, UciError, UciPath, UciSection,
};

pub const DEFAULT_LOCK_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyMode {
    Create,
    Replace,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CommitReport {
    pub sections_created: usize,
    pub entries_written: usize,
}

impl CommitReport {
    pub fn is_empty(&self) -> bool {
        self.sections_created == 0 && self.entries_written == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadValue {
    Single(String),
    Many(Vec<String>),
    Absent,
}

#[derive(Debug, Clone)]
pub struct UciStore {
    root: PathBuf,
    lock_timeout: Duration,
}

/// Proof that the store-wide writer lock is held. Dropping releases it.
#[derive(Debug)]
pub struct WriteLock {
    _file: File,
}

impl UciStore {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        UciStore {
            root: root.into(),
            lock_timeout: DEFAULT_LOCK_TIMEOUT,
        }
    }

    pub fn with_lock_timeout(mut self, timeout: Duration) -> Self {
        self.lock_timeout = timeout;
        self
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn package_path(&self, package: &str) -> PathBuf {
        self.root.join(package)
    }

    /// Missing package files read as empty packages.
    pub fn read_package(&self, package: &str) -> Result<UciDocument, UciError> {
        let path = self.package_path(package);
        match fs::read_to_string(&path) {
            Ok(text) => parse_uci(package, &text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Ok(UciDocument::new(package))
            }
            Err(e) => Err(UciError::Io(e)),
        }
    }

    pub fn count_sections(&self, package: &str, section_type: &str) -> Result<usize, UciError> {
        let doc = self.read_package(package)?;
        Ok(doc.sections_of_type(section_type).count())
    }

    pub fn read_value(&self, path: &UciPath) -> Result<ReadValue, UciError> {
        let option = path
            .option
            .as_deref()
            .expect("read_value requires an option in the path");
        let doc = self.read_package(&path.package)?;
        let section = match resolve_section(&doc, path)? {
            Some(idx) => &doc.sections[idx],
            None => return Ok(ReadValue::Absent),
        };
        let mut listed = Vec::new();
        for entry in &section.entries {
            if entry.name != option {
                continue;
            }
            match entry.kind {
                EntryKind::Option => return Ok(ReadValue::Single(entry.value.clone())),
                EntryKind::List => listed.push(entry.value.clone()),
            }
        }
        if listed.is_empty() {
            Ok(ReadValue::Absent)
        } else {
            Ok(ReadValue::Many(listed))
        }
    }

    /// Acquire the store-wide writer lock, waiting up to the configured
    /// timeout.
    pub fn lock(&self) -> Result<WriteLock, UciError> {
        fs::create_dir_all(&self.root)?;
        let file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.root.join(".lock"))?;
        let deadline = Instant::now() + self.lock_timeout;
        loop {
            let rc = unsafe { libc::flock(file.as_raw_fd(), libc::LOCK_EX | libc::LOCK_NB) };
            if rc == 0 {
                return Ok(WriteLock { _file: file });
            }
            let err = std::io::Error::last_os_error();
            if err.raw_os_error() != Some(libc::EWOULDBLOCK) {
                return Err(UciError::Io(err));
            }
            if Instant::now() >= deadline {
                return Err(UciError::LockTimeout(self.lock_timeout));
            }
            std::thread::sleep(Duration::from_millis(10));
        }
    }

    pub fn with_writer_lock<R>(
        &self,
        action: impl FnOnce(&WriteLock) -> R,
    ) -> Result<R, UciError> {
        let lock = self.lock()?;
        Ok(action(&lock))
    }

    /// Apply an ordered list of flattened entries (container entries before
    /// their descendants) and commit every touched package atomically.
    pub fn apply_changes(
        &self,
        _lock: &WriteLock,
        entries: &[FlattenedEntry],
        mode: ApplyMode,
    ) -> Result<CommitReport, UciError> {
        if entries.is_empty() {
            return Ok(CommitReport::default());
        }
        let mut docs: HashMap<String, UciDocument> = HashMap::new();
        let mut order: Vec<String> = Vec::new();
        // (package, section position, list name) already cleared in replace mode
        let mut cleared_lists: Vec<(String, usize, String)> = Vec::new();
        let mut report = CommitReport::default();

        for entry in entries {
            let pkg = entry.path.package.clone();
            if !docs.contains_key(&pkg) {
                docs.insert(pkg.clone(), self.read_package(&pkg)?);
                order.push(pkg.clone());
            }
            let doc = docs.get_mut(&pkg).unwrap();
            apply_one(doc, entry, mode, &mut cleared_lists, &mut report)?;
        }
        for pkg in &order {
            self.commit(&docs[pkg])?;
        }
        Ok(report)
    }

    /// Remove the addressed option, list, section, or all sections of a
    /// type. Returns how many sections/entries were removed.
    pub fn delete_at(&self, _lock: &WriteLock, path: &UciPath) -> Result<usize, UciError> {
        let mut doc = self.read_package(&path.package)?;
        let removed = delete_in_doc(&mut doc, path)?;
        self.commit(&doc)?;
        Ok(removed)
    }

    fn commit(&self, doc: &UciDocument) -> Result<(), UciError> {
        self.commit_inner(doc, false)
    }

    // The fault flag aborts between temp-file write and rename; used to
    // verify that an interrupted commit leaves the previous content intact.
    fn commit_inner(&self, doc: &UciDocument, fail_before_rename: bool) -> Result<(), UciError> {
        for section in &doc.sections {
            for entry in &section.entries {
                if !is_writable_value(&entry.value) {
                    return Err(UciError::UnsupportedValue(
                        entry.name.clone(),
                        entry.value.clone(),
                    ));
                }
            }
        }
        fs::create_dir_all(&self.root)?;
        let tmp = self.root.join(format!(".{}.tmp", doc.package_name));
        let text = serialize_uci(doc);
        {
            let mut f = File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        if fail_before_rename {
            return Err(UciError::Io(std::io::Error::other(
                "injected fault before rename",
            )));
        }
        fs::rename(&tmp, self.package_path(&doc.package_name))?;
        Ok(())
    }
}

/// Resolve the section a path addresses, or `None` when absent.
fn resolve_section(doc: &UciDocument, path: &UciPath) -> Result<Option<usize>, UciError> {
    if let Some(name) = &path.section_name {
        return Ok(doc
            .sections
            .iter()
            .position(|s| s.section_type == path.section_type && s.name.as_deref() == Some(name)));
    }
    if let Some(index) = path.index {
        let mut seen = 0;
        for (i, s) in doc.sections.iter().enumerate() {
            if s.section_type == path.section_type {
                if seen == index {
                    return Ok(Some(i));
                }
                seen += 1;
            }
        }
        return Ok(None);
    }
    // neither name nor index: only a unique section of the type resolves
    let matches: Vec<usize> = doc
        .sections
        .iter()
        .enumerate()
        .filter(|(_, s)| s.section_type == path.section_type)
        .map(|(i, _)| i)
        .collect();
    match matches.len() {
        0 => Ok(None),
        1 => Ok(Some(matches[0])),
        _ => Err(UciError::AmbiguousPath(path.to_string())),
    }
}

fn apply_one(
    doc: &mut UciDocument,
    entry: &FlattenedEntry,
    mode: ApplyMode,
    cleared_lists: &mut Vec<(String, usize, String)>,
    report: &mut CommitReport,
) -> Result<(), UciError> {
    let path = &entry.path;
    match entry.kind {
        FlatKind::Container => {
            if let Some(name) = &path.section_name {
                match doc
                    .sections
                    .iter()
                    .position(|s| s.section_type == path.section_type && s.name.as_deref() == Some(name))
                {
                    Some(i) => match mode {
                        ApplyMode::Create => {
                            return Err(UciError::Conflict(path.to_string()));
                        }
                        ApplyMode::Replace => {
                            doc.sections[i].entries.clear();
                        }
                    },
                    None => {
                        doc.sections
                            .push(UciSection::new(path.section_type.clone(), Some(name.clone())));
                        report.sections_created += 1;
                    }
                }
            } else {
                doc.sections
                    .push(UciSection::new(path.section_type.clone(), None));
                report.sections_created += 1;
            }
            Ok(())
        }
        FlatKind::Option | FlatKind::List => {
            let value = entry.value.clone().ok_or_else(|| {
                UciError::UnsupportedValue(path.to_string(), "missing value".into())
            })?;
            if !is_writable_value(&value) {
                return Err(UciError::UnsupportedValue(path.to_string(), value));
            }
            let idx = resolve_or_create_section(doc, path, report)?;
            let section = &mut doc.sections[idx];
            match entry.kind {
                FlatKind::Option => {
                    let existing = section
                        .entries
                        .iter()
                        .position(|e| e.kind == EntryKind::Option && e.name == path.option.clone().unwrap_or_default());
                    let name = path.option.clone().ok_or_else(|| {
                        UciError::UnsupportedValue(path.to_string(), "missing option name".into())
                    })?;
                    match existing {
                        Some(i) => {
                            if mode == ApplyMode::Create {
                                return Err(UciError::Conflict(path.to_string()));
                            }
                            section.entries[i].value = value;
                        }
                        None => section.entries.push(UciEntry {
                            kind: EntryKind::Option,
                            name,
                            value,
                        }),
                    }
                    report.entries_written += 1;
                }
                FlatKind::List => {
                    let name = path.option.clone().ok_or_else(|| {
                        UciError::UnsupportedValue(path.to_string(), "missing list name".into())
                    })?;
                    if mode == ApplyMode::Replace {
                        let key = (doc.package_name.clone(), idx, name.clone());
                        if !cleared_lists.contains(&key) {
                            doc.sections[idx]
                                .entries
                                .retain(|e| !(e.kind == EntryKind::List && e.name == name));
                            cleared_lists.push(key);
                        }
                    }
                    doc.sections[idx].entries.push(UciEntry {
                        kind: EntryKind::List,
                        name,
                        value,
                    });
                    report.entries_written += 1;
                }
                FlatKind::Container => unreachable!(),
            }
            Ok(())
        }
    }
}

fn resolve_or_create_section(
    doc: &mut UciDocument,
    path: &UciPath,
    report: &mut CommitReport,
) -> Result<usize, UciError> {
    if let Some(idx) = resolve_section(doc, path)? {
        return Ok(idx);
    }
    // implicit creation: named sections anywhere, index-addressed sections
    // only when the index is the next free slot
    if let Some(name) = &path.section_name {
        doc.sections
            .push(UciSection::new(path.section_type.clone(), Some(name.clone())));
        report.sections_created += 1;
        return Ok(doc.sections.len() - 1);
    }
    let count = doc.sections_of_type(&path.section_type).count();
    match path.index {
        Some(i) if i == count => {}
        Some(_) => return Err(UciError::NotFound(path.to_string())),
        None if count == 0 => {}
        None => return Err(UciError::AmbiguousPath(path.to_string())),
    }
    doc.sections
        .push(UciSection::new(path.section_type.clone(), None));
    report.sections_created += 1;
    Ok(doc.sections.len() - 1)
}

fn delete_in_doc(doc: &mut UciDocument, path: &UciPath) -> Result<usize, UciError> {
    if let Some(option) = &path.option {
        let idx = resolve_section(doc, path)?
            .ok_or_else(|| UciError::NotFound(path.to_string()))?;
        let before = doc.sections[idx].entries.len();
        doc.sections[idx].entries.retain(|e| e.name != *option);
        let removed = before - doc.sections[idx].entries.len();
        if removed == 0 {
            return Err(UciError::NotFound(path.to_string()));
        }
        return Ok(removed);
    }
    if path.section_name.is_some() || path.index.is_some() {
        let idx = resolve_section(doc, path)?
            .ok_or_else(|| UciError::NotFound(path.to_string()))?;
        doc.sections.remove(idx);
        return Ok(1);
    }
    let before = doc.sections.len();
    doc.sections.retain(|s| s.section_type != path.section_type);
    let removed = before - doc.sections.len();
    if removed == 0 {
        return Err(UciError::NotFound(path.to_string()));
    }
    Ok(removed)
}
