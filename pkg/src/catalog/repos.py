"""
Repository over the fixture directory.

Each fixture is one TOML file named ``<id>.toml``; the repository validates it
into a :class:`~src.catalog.schema.FixtureSpec` and parses it into a
:class:`~src.catalog.models.ModelFixture`. Parsed fixtures are read-only and
cached per repository instance.
"""

import logging
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from config.general import settings
from src.exceptions import FixtureNotFoundError
from src.catalog.models import ModelFixture
from src.catalog.schema import FixtureSpec, ManifestEntry

logger = logging.getLogger(__name__)


class FixtureRepository:
    """
    Args:
        root (Path | None): Directory holding the fixture files; defaults to
            ``settings.fixtures_dir``.
    """

    def __init__(self, root: Path | None = None):
        self.root = Path(root or settings.fixtures_dir)
        self._cache: dict[str, ModelFixture] = {}

    def ids(self) -> list[str]:
        return sorted(path.stem for path in self.root.glob("*.toml"))

    def load_spec(self, fixture_id: str) -> FixtureSpec:
        """
        Read and validate a fixture file.

        Raises:
            FixtureNotFoundError: If no file exists for ``fixture_id``.
        """
        path = self.root / f"{fixture_id}.toml"
        if not path.is_file():
            raise FixtureNotFoundError(f"unknown fixture '{fixture_id}'")
        with path.open("rb") as handle:
            data = tomllib.load(handle)
        return FixtureSpec.model_validate(data)

    def load_model(self, fixture_id: str) -> ModelFixture:
        if fixture_id not in self._cache:
            logger.debug("loading fixture %s", fixture_id)
            self._cache[fixture_id] = ModelFixture(self.load_spec(fixture_id))
        return self._cache[fixture_id]

    def list_fixtures(self) -> list[ManifestEntry]:
        manifest = []
        for fixture_id in self.ids():
            spec = self.load_spec(fixture_id)
            manifest.append(
                ManifestEntry(id=spec.id, locus=spec.locus, quote=spec.quote, rows=[row.name for row in spec.multipliers])
            )
        return manifest


_default: FixtureRepository | None = None


def get_repository() -> FixtureRepository:
    """FastAPI dependency handing out one shared repository per process."""
    global _default
    if _default is None:
        _default = FixtureRepository()
    return _default
