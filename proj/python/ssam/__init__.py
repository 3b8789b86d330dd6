"""LSTM + sequential self-attention time-series forecaster."""

from ssam._core import (  # noqa: F401
    AdamHyper,
    BaselineForecast,
    DataError,
    DatasetOptions,
    EvaluationReport,
    ForecastRow,
    ModelBundle,
    ModelConfig,
    ModelParams,
    NumericError,
    OhlcvRecord,
    PreparedDataset,
    PriceSeries,
    ScalerParams,
    ShapeError,
    SplitSeries,
    TrainConfig,
    UsageError,
    WindowedDataset,
    __version__,
    best_sma_window,
    chronological_split,
    count_params,
    evaluate,
    fit_scaler,
    forecast_report,
    init_params,
    inverse_scale,
    load_csv,
    load_model,
    make_windows,
    model_forward,
    mse_loss,
    parse_csv,
    pearson_correlation,
    prepare_dataset,
    r2,
    random_walk_forecast,
    rmse,
    save_model,
    save_model_text,
    scale,
    scale_all,
    select_feature,
    sma,
    sma_forecast,
    to_csv,
    train,
)
