use std::fs;
use std::path::Path;

use crate::label::Label;

use super::{parse_eml, parse_mbox, to_example, Corpus, CorpusError, LabeledExample, MboxSkip};

/// Load `<dir>/spam/*` and `<dir>/ham/*`, one EML message per file.
///
/// Files are read in name order, spam first; ids are `spam/<file name>` or
/// `ham/<file name>`. Hidden files are ignored. Any unparsable file is an
/// error naming that file. A missing class directory contributes nothing.
pub fn load_eml_dir(dir: &Path) -> Result<Corpus, CorpusError> {
    if !dir.is_dir() {
        return Err(CorpusError::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        ));
    }
    let mut examples = Vec::new();
    for label in Label::ALL {
        let sub = dir.join(label.as_str());
        if !sub.is_dir() {
            continue;
        }
        let mut files: Vec<_> = fs::read_dir(&sub)
            .map_err(|e| CorpusError::io(&sub, e))?
            .map(|entry| entry.map(|e| e.path()).map_err(|e| CorpusError::io(&sub, e)))
            .collect::<Result<_, _>>()?;
        files.retain(|p| {
            p.is_file() && !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.'))
        });
        files.sort();
        for path in files {
            let bytes = fs::read(&path).map_err(|e| CorpusError::io(&path, e))?;
            let mut email = parse_eml(&bytes).map_err(|e| CorpusError::in_file(&path, e))?;
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            email.id = format!("{}/{name}", label.as_str());
            email.source = path.display().to_string();
            examples.push(to_example(&email, label));
        }
    }
    Ok(Corpus::new(examples))
}

/// Every parsable message of one mbox file, all carrying `label`. Ids are
/// `<file name>#<index>`.
pub fn load_mbox_file(path: &Path, label: Label) -> Result<(Vec<LabeledExample>, Vec<MboxSkip>), CorpusError> {
    let bytes = fs::read(path).map_err(|e| CorpusError::io(path, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let parsed = parse_mbox(&bytes, &name).map_err(|e| CorpusError::in_file(path, e))?;
    let examples = parsed.emails.iter().map(|e| to_example(e, label)).collect();
    Ok((examples, parsed.skipped))
}
