"""Small numpy tensor engine: autodiff tape, layers, optimizer."""

from .functional import (
    adaptive_avg_pool,
    channel_norm,
    conv1d,
    conv2d,
    cross_entropy,
    gqa_attention,
    linear,
    rms_norm,
    swiglu_ffn,
)
from .optim import AdamState, AdamW, Parameter, PlateauState, adamw_step, glorot_uniform, lr_schedule
from .tensor import (
    Tensor,
    add,
    concat,
    default_dtype,
    get_default_dtype,
    getitem,
    index_select,
    is_grad_enabled,
    matmul,
    mean,
    mul,
    no_grad,
    relu,
    reshape,
    scatter_add,
    sigmoid,
    softmax,
    stack,
    sub,
    swish,
    transpose,
    tsum,
)
