from enum import Enum

class Keywords(Enum):
    """
    The keys recognized in a JSON configuration document
    """

    Modules = "modules"
    Name = "name"
    Role = "role"
    ParamCount = "param_count"
    Adapter = "adapter"
    Rank = "rank"
    Alpha = "alpha"
    TargetsPerLayer = "targets_per_layer"
    LayerCount = "layer_count"
    TargetDims = "target_dims"
    CostModel = "cost_model"
    CFwd = "c_fwd"
    CActBwd = "c_act_bwd"
    CWgrad = "c_wgrad"
    Strategies = "strategies"
    Id = "id"
    Stages = "stages"
    Kind = "kind"
    Convergence = "convergence"
    Trainable = "trainable"
    Module = "module"
    Base = "base"
    Dataset = "dataset"
    Hours = "hours"
    FrameRate = "frame_rate"
    Downsample = "downsample"
    TextTokensPerSecond = "text_tokens_per_second"
    Epochs = "epochs"
