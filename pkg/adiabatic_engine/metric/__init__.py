"""Metric tensors, metric fields and the path error functional."""

from __future__ import annotations

from .field import (
    IsingAnalyticField,
    MetricField,
    ModelMetricField,
    ScalarMetricField,
    as_metric_field,
    field_model,
)
from .path_error import PathErrorAccumulator, knot_profile, path_error_functional
from .tensor import (
    MetricBounds,
    MetricSample,
    bures_metric,
    brachistochrone_metric,
    fidelity_expansion_defect,
    geometric_tensor,
    geometric_tensor_integral,
    grassmannian_distance,
    metric_bounds,
    metric_nondegenerate,
    metric_sample,
    metric_tensor,
    metric_tensor_projector_form,
    resolvent_metric_check,
    symmetric_log_derivative,
    trace_norm,
)

__all__ = [
    "IsingAnalyticField",
    "MetricBounds",
    "MetricField",
    "MetricSample",
    "ModelMetricField",
    "PathErrorAccumulator",
    "ScalarMetricField",
    "as_metric_field",
    "brachistochrone_metric",
    "bures_metric",
    "fidelity_expansion_defect",
    "field_model",
    "geometric_tensor",
    "geometric_tensor_integral",
    "grassmannian_distance",
    "knot_profile",
    "metric_bounds",
    "metric_nondegenerate",
    "metric_sample",
    "metric_tensor",
    "metric_tensor_projector_form",
    "path_error_functional",
    "resolvent_metric_check",
    "symmetric_log_derivative",
    "trace_norm",
]
