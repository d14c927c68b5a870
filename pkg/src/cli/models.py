"""
Pydantic models for the run manifest
"""
import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.errors import ManifestError


def _path_field(name: str, description: str):
    return Field(
        default=None,
        validation_alias=AliasChoices(name, name.replace("_", "-")),
        description=description,
    )


class RunManifest(BaseModel):
    """JSON run description shared by every subcommand"""
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    n_sys: int = Field(..., ge=0, description="System prompt token count")
    n_img: int = Field(..., ge=1, description="Image token count")
    n_usr: int = Field(..., ge=1, description="User token count")
    metric: Literal["cosine", "euclidean", "manhattan"] = "cosine"
    keep: Optional[int] = Field(default=None, ge=0, description="Image tokens to keep")
    ignore: Optional[int] = Field(default=None, ge=0, description="Image tokens to ignore")
    strategy: Literal["flat-topk", "max-over-text"] = "max-over-text"
    seed: int = 0
    image_embeddings: Optional[str] = _path_field("image_embeddings", "(n_img, T) tensor file")
    text_embeddings: Optional[str] = _path_field("text_embeddings", "(n_usr, T) tensor file")
    attention: Optional[str] = _path_field("attention", "(1, H, Q, n_sys+n_img+n_usr) tensor file")
    feature_map: Optional[str] = _path_field("feature_map", "(C', H', W') encoder output")
    alignment: Optional[str] = _path_field("alignment", "(I, T) alignment weights")

    @model_validator(mode="after")
    def _check_budget(self) -> "RunManifest":
        if (self.keep is None) == (self.ignore is None):
            raise ValueError("exactly one of 'keep' or 'ignore' must be given")
        value = self.keep if self.keep is not None else self.ignore
        if value > self.n_img:
            raise ValueError(f"keep/ignore value {value} exceeds n_img={self.n_img}")
        if self.text_embeddings is None:
            raise ValueError("'text_embeddings' is required")
        if self.image_embeddings is None and (self.feature_map is None or self.alignment is None):
            raise ValueError("give 'image_embeddings' or both 'feature_map' and 'alignment'")
        return self

    @property
    def keep_budget(self) -> int:
        return self.keep if self.keep is not None else self.n_img - self.ignore

    def resolve_paths(self, base_dir: Path) -> "RunManifest":
        """Resolve relative file paths against ``base_dir`` and check they exist"""
        updates = {}
        for name in ("image_embeddings", "text_embeddings", "attention", "feature_map", "alignment"):
            value = getattr(self, name)
            if value is None:
                continue
            path = Path(value)
            if not path.is_absolute():
                path = base_dir / path
            if not path.is_file():
                raise ManifestError(f"{name} file not found: {path}")
            updates[name] = str(path)
        return self.model_copy(update=updates)


def load_manifest(path) -> RunManifest:
    """Read, validate and resolve a manifest file"""
    manifest_path = Path(path)
    try:
        data = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {manifest_path}") from None
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest is not valid JSON: {e}") from None
    try:
        manifest = RunManifest.model_validate(data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'manifest'}: {err['msg']}" for err in e.errors()
        )
        raise ManifestError(details) from None
    return manifest.resolve_paths(manifest_path.parent)
