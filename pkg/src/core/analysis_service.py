"""
Main application service that orchestrates the manifest-driven workflows.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from src.analysis import attention as attn
from src.analysis import clusters
from src.adapters.tensor_file import read_tensor
from src.core.embed_pipeline import AlignmentMap, FeatureMap, adaptive_pool, feature_align
from src.core.errors import ManifestError, ValidationError
from src.core.interfaces import SimilarityMatrix, SimilaritySelection
from src.core.plugin_loader import plugin_loader
from src.core.selection import (
    Band, TokenMask, band_selection_from_similarity, build_mask, descending_order,
    keep_from_ignore, random_trials_from_similarity, select_from_similarity, similarity_matrix
)
from src.core.token_space import AttentionTensor, EmbeddingMatrix, TokenSegmentation, make_segmentation
from src.utils.config import app_config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunInputs:
    """Tensors referenced by a manifest, validated against its counts"""
    seg: TokenSegmentation
    img: EmbeddingMatrix = field(repr=False)
    txt: EmbeddingMatrix = field(repr=False)
    attention: Optional[AttentionTensor] = field(default=None, repr=False)

    __hash__ = None


@dataclass(frozen=True)
class SweepRow:
    """One ignored-count setting of the sweep"""
    ignore: int
    kept: Tuple[int, ...]
    popcount: int
    active_keys: int
    mac_count: int
    degenerate_rows: int = 0


@dataclass(frozen=True)
class ClusterReport:
    """Projection, clustering and the similarity-ignored overlay"""
    projection: clusters.Projection2D = field(repr=False)
    assignment: clusters.ClusterAssignment = field(repr=False)
    ignored: Tuple[int, ...]
    overlap: List[int]
    kept_after_cluster_ignore: Optional[List[int]] = None

    __hash__ = None


class AnalysisService:
    """Main service for orchestrating Simignore runs"""

    def __init__(self):
        plugin_loader.ensure_loaded()
        self.registry = plugin_loader.registry

    def get_available_metrics(self) -> List[str]:
        return self.registry.get_metric_names()

    def get_available_strategies(self) -> List[str]:
        return self.registry.get_strategy_names()

    # ------------------------------------------------------------------ inputs

    def load_inputs(self, manifest) -> RunInputs:
        """Read every tensor the manifest names and check it against the counts"""
        seg = make_segmentation(manifest.n_sys, manifest.n_img, manifest.n_usr)
        txt = self._read_matrix(manifest.text_embeddings, "text_embeddings")
        if manifest.image_embeddings is not None:
            img = self._read_matrix(manifest.image_embeddings, "image_embeddings")
        else:
            img = self._embed_from_feature_map(manifest)

        if img.rows != seg.n_img:
            raise ManifestError(f"image_embeddings has {img.rows} rows, manifest declares n_img={seg.n_img}")
        if txt.rows != seg.n_usr:
            raise ManifestError(f"text_embeddings has {txt.rows} rows, manifest declares n_usr={seg.n_usr}")
        if img.dim != txt.dim:
            raise ManifestError(f"image dim {img.dim} != text dim {txt.dim}")

        attention = None
        if manifest.attention is not None:
            attention = AttentionTensor(read_tensor(manifest.attention))
            if attention.n_key != seg.total():
                raise ManifestError(
                    f"attention has {attention.n_key} keys, manifest declares {seg.total()} tokens"
                )
        return RunInputs(seg=seg, img=img, txt=txt, attention=attention)

    def _read_matrix(self, path: str, name: str) -> EmbeddingMatrix:
        data = read_tensor(path)
        if data.ndim != 2:
            raise ManifestError(f"{name} must be a 2-D tensor, got shape {data.shape}")
        return EmbeddingMatrix(data)

    def _embed_from_feature_map(self, manifest) -> EmbeddingMatrix:
        fm = FeatureMap(read_tensor(manifest.feature_map))
        alignment = AlignmentMap(read_tensor(manifest.alignment))
        pooled = adaptive_pool(fm, manifest.n_img, alignment.in_dim)
        logger.info("pooled feature map %s to %dx%d", fm.data.shape, pooled.rows, pooled.dim)
        return feature_align(pooled, alignment)

    def similarity(self, manifest, inputs: RunInputs) -> SimilarityMatrix:
        return similarity_matrix(inputs.img, inputs.txt, manifest.metric)

    # -------------------------------------------------------------- selection

    def select(self, manifest, inputs: Optional[RunInputs] = None) -> SimilaritySelection:
        """Run the manifest's metric and strategy with its keep budget"""
        inputs = inputs or self.load_inputs(manifest)
        s = self.similarity(manifest, inputs)
        return select_from_similarity(s, manifest.keep_budget, manifest.strategy)

    def selection_rows(self, selection: SimilaritySelection) -> List[Tuple[int, float, bool]]:
        """(image_index, score, kept) ordered by descending score"""
        kept = set(selection.kept_image_indices)
        order = descending_order(selection.scores)
        return [(int(i), float(selection.scores[i]), int(i) in kept) for i in order]

    def mask(self, manifest, inputs: Optional[RunInputs] = None) -> TokenMask:
        inputs = inputs or self.load_inputs(manifest)
        selection = self.select(manifest, inputs)
        return build_mask(inputs.seg, selection.kept_image_indices)

    def ablate(self, manifest, band: str, ignore: int, trials: int = 1,
               seed: Optional[int] = None,
               inputs: Optional[RunInputs] = None) -> List[SimilaritySelection]:
        """Importance-band selections; random bands repeat over consecutive seeds"""
        inputs = inputs or self.load_inputs(manifest)
        if trials < 1:
            raise ValidationError(f"trials must be >= 1, got {trials}")
        seed = manifest.seed if seed is None else seed
        s = self.similarity(manifest, inputs)
        if Band(band) is Band.RANDOM:
            return list(random_trials_from_similarity(s, ignore, seed, trials))
        return [band_selection_from_similarity(s, band, ignore, seed)]

    def sweep(self, manifest, ignore_list: Sequence[int],
              inputs: Optional[RunInputs] = None) -> List[SweepRow]:
        """Kept sets, mask popcounts and simulated compute for each ignored count"""
        inputs = inputs or self.load_inputs(manifest)
        s = self.similarity(manifest, inputs)
        head_dim = app_config.attention.head_dim
        rows = []
        for ignore in ignore_list:
            keep = keep_from_ignore(inputs.seg.n_img, ignore)
            selection = select_from_similarity(s, keep, manifest.strategy)
            token_mask = build_mask(inputs.seg, selection.kept_image_indices)
            if inputs.attention is not None:
                report = attn.simulate_masked_pass(inputs.attention, token_mask, head_dim)
                active, macs, degenerate = (report.active_key_count, report.multiply_accumulate_count,
                                            len(report.degenerate_rows))
            else:
                active = token_mask.popcount()
                macs = attn.masked_mac_count(1, inputs.seg.total(), active, head_dim)
                degenerate = 0
            rows.append(SweepRow(
                ignore=int(ignore),
                kept=tuple(sorted(selection.kept_image_indices)),
                popcount=token_mask.popcount(),
                active_keys=active,
                mac_count=macs,
                degenerate_rows=degenerate,
            ))
            logger.info("ignore %d: %d active keys, %d MACs", ignore, active, macs)
        return rows

    # --------------------------------------------------------------- analysis

    def heatmap(self, manifest, query: Union[str, int] = None, head_agg=None,
                inputs: Optional[RunInputs] = None) -> Tuple[attn.HeatGrid, attn.InfluenceSummary]:
        inputs = inputs or self.load_inputs(manifest)
        if inputs.attention is None:
            raise ManifestError("heatmap needs an 'attention' tensor in the manifest")
        cfg = app_config.attention
        query = cfg.default_query if query is None else query
        head_agg = cfg.default_head_agg if head_agg is None else head_agg
        summary = attn.segment_shares(inputs.attention, inputs.seg, query, head_agg)
        grid = attn.influence_heatmap(inputs.attention, inputs.seg, query, head_agg)
        return grid, summary

    def cluster(self, manifest, k: Optional[int] = None, seed: Optional[int] = None,
                mode: Optional[str] = None, ignore_clusters: Sequence[int] = None,
                inputs: Optional[RunInputs] = None) -> ClusterReport:
        """Project and cluster the image embeddings; overlay the similarity-ignored tokens"""
        inputs = inputs or self.load_inputs(manifest)
        cfg = app_config.clusters
        k = cfg.default_k if k is None else k
        seed = manifest.seed if seed is None else seed
        mode = cfg.default_mode if mode is None else mode
        if mode not in ("2d", "full"):
            raise ValidationError(f"cluster mode must be '2d' or 'full', got {mode!r}")

        projection = clusters.project_2d(inputs.img)
        source = projection if mode == "2d" else inputs.img
        assignment = clusters.kmeans(source, k, seed)
        selection = self.select(manifest, inputs)
        ignored = selection.ignored_image_indices
        kept = None
        if ignore_clusters is not None:
            kept = clusters.cluster_ignore_selection(assignment, ignore_clusters)
        return ClusterReport(
            projection=projection,
            assignment=assignment,
            ignored=ignored,
            overlap=clusters.overlap_report(ignored, assignment),
            kept_after_cluster_ignore=kept,
        )

    def scatter(self, manifest, inputs: Optional[RunInputs] = None) -> clusters.JointProjection:
        inputs = inputs or self.load_inputs(manifest)
        return clusters.project_joint(inputs.img, inputs.txt)

