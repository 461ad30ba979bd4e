"""GCN-assisted greedy scheduling on k-tolerant conflict graphs."""

__version__ = "0.1.0"

from .errors import CapacityError, ContractViolation, FormatError, ParameterError, TrainingDiverged
from .eval import RatioStats, emit_table, evaluate
from .gcn import GcnModel, forward, gradients, init_model, load_model, save_model
from .graph import WeightedGraph, generate_ba, generate_er, normalized_laplacian, read_graphs, write_graphs
from .kis import (ScheduleSet, exact_max_weight_kis, greedy_k_independent_set, is_k_independent,
                  set_weight)
from .loss import Betas, CostBreakdown, cost_and_grad, penalty_p1, penalty_p2, reward_r1
from .train import DatasetSpec, TrainConfig, build_dataset, train_model
