"""
Corpus manifest
UTF-8 TSV, one entry per line: path<TAB>transcription (transcription optional),
lines starting with '#' are comments. Paths are relative to the manifest root.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from src.python.corpus.word_image import WordImage, normalize, read_image
from src.python.utils.errors import EmptyCorpus, IoError, ManifestError

MANIFEST_NAME = 'manifest.tsv'


@dataclass(frozen=True)
class ManifestEntry:
    image_path: str
    transcription: Optional[str] = None


@dataclass
class Manifest:
    """Image paths (relative to root) with optional transcriptions"""

    root: Path
    entries: List[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        self.root = Path(self.root)
        for entry in self.entries:
            if entry.transcription is not None and not entry.transcription:
                raise ManifestError(f"empty transcription for {entry.image_path}")

    def __len__(self) -> int:
        return len(self.entries)

    def resolve(self, entry: ManifestEntry) -> Path:
        """Absolute path of an entry; must stay under the manifest root"""
        root = self.root.resolve()
        path = (root / entry.image_path).resolve()
        try:
            path.relative_to(root)
        except ValueError:
            raise ManifestError(f"image path escapes manifest root: {entry.image_path}")
        return path

    @property
    def has_transcriptions(self) -> bool:
        return bool(self.entries) and all(e.transcription is not None for e in self.entries)

    def transcriptions(self) -> List[str]:
        if not self.has_transcriptions:
            raise ManifestError(f"manifest under {self.root} lacks transcriptions")
        return [e.transcription for e in self.entries]

    @classmethod
    def load(cls, path: Path, root: Optional[Path] = None) -> 'Manifest':
        """Parse a manifest file; the root defaults to the manifest's directory"""
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise IoError(f"cannot read manifest {path}: {exc}") from exc

        entries = []
        for line_no, raw in enumerate(text.splitlines(), 1):
            line = raw.rstrip('\r')
            if not line.strip() or line.startswith('#'):
                continue
            parts = line.split('\t')
            if len(parts) > 2:
                raise ManifestError(f"{path}:{line_no}: expected at most 2 columns, got {len(parts)}")
            image_path = parts[0].strip()
            if not image_path:
                raise ManifestError(f"{path}:{line_no}: missing image path")
            transcription = parts[1].strip() if len(parts) == 2 else ''
            entries.append(ManifestEntry(image_path, transcription or None))

        manifest = cls(root=Path(root) if root is not None else path.parent, entries=entries)
        for entry in manifest.entries:
            manifest.resolve(entry)
        return manifest

    def save(self, path: Path) -> Path:
        path = Path(path)
        lines = ['# path\ttranscription']
        for entry in self.entries:
            if entry.transcription is None:
                lines.append(entry.image_path)
            else:
                lines.append(f"{entry.image_path}\t{entry.transcription}")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        except OSError as exc:
            raise IoError(f"cannot write manifest {path}: {exc}") from exc
        return path


def load_word_images(
    manifest: Manifest,
    height: int,
    width: int,
    invert: bool = True,
    indices: Optional[Sequence[int]] = None
) -> List[WordImage]:
    """Read and normalize manifest images (all, or the given entry indices)"""
    selected = range(len(manifest.entries)) if indices is None else indices
    images = [
        normalize(read_image(manifest.resolve(manifest.entries[i])), height, width, invert=invert)
        for i in selected
    ]
    if not images:
        raise EmptyCorpus(f"no images in manifest under {manifest.root}")
    return images
