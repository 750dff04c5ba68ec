from .config import Config
from .data import (
    Annotations,
    DatasetError,
    Example,
    gold_mask,
    load_annotated,
    load_dataset,
    split_dataset,
)
from .checkpoint import (
    Checkpoint,
    CheckpointError,
    load_checkpoint,
    save_checkpoint,
)
from .reports import (
    MetricsReport,
    plot_grid,
    plot_history,
    plot_metrics,
    run_directory,
    write_grid,
    write_report,
)
from .assets import (
    Assets,
    PreparedQuestion,
    assets_from_checkpoint,
    build_assets,
    load_corpus_and_index,
    prepare_question,
)
from .retrieve import (
    ChoiceEvidence,
    encode_reader_example,
    essential_masks,
    materialize_evidence,
    selector_mask_for,
)
from .train import (
    TrainResult,
    build_reader_bundles,
    reader_flags,
    reader_from_checkpoint,
    selector_from_checkpoint,
    train_reader,
    train_selector,
)
from .evaluate import (
    GRID_DEPTHS,
    ReaderContext,
    evaluate_accuracy,
    evaluate_grid,
    evaluate_selector,
    load_reader_context,
    pick_split,
    run_pipeline,
    selector_predictions,
    trace_question,
)

__all__ = [k for k in dir() if not k.startswith("_")]
