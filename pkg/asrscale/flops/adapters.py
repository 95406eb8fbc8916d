from typing import Optional

from asrscale.core.architecture import AdapterSpec, ModuleSpec


def adapter_params(adapter: AdapterSpec) -> int:
    """
    Count the parameters of a low-rank adapter: every target of every layer
    holds an A (d_in x r) and a B (r x d_out) matrix. Alpha only scales the
    update and does not change the count.

    :param adapter: the adapter spec
    :returns: the parameter count
    """

    per_layer: int = sum(adapter.rank * (d_in + d_out) for d_in, d_out in adapter.target_dims)
    return adapter.layer_count * per_layer


def module_adapter_params(module: ModuleSpec) -> int:
    adapter: Optional[AdapterSpec] = module.adapter
    return 0 if adapter is None else adapter_params(adapter)
