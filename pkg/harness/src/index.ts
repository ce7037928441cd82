export { Graph, Tensor } from "./autograd.js";
export { Checkpoint, Tags, loadCheckpoint, saveCheckpoint } from "./checkpoint.js";
export { CURVE_SCHEMA, Curve, CurveWriter, Stage, readCurve } from "./curves.js";
export {
  Batcher,
  Dataset,
  ShardDataset,
  Split,
  TEXT_VOCAB,
  TextDataset,
  WindowPair,
} from "./data.js";
export {
  COMPONENTS,
  Component,
  ModelConfig,
  Params,
  componentOf,
  countParams,
  forwardLogits,
  forwardLoss,
  initParams,
  validateConfig,
} from "./model.js";
export { AdamW, DEFAULT_OPTIM, OptimConfig, clipGradients, learningRate } from "./optim.js";
export {
  MaskError,
  ReinitMask,
  effectiveComponents,
  freshParams,
  parseMask,
  transferParams,
  verifyTransfer,
} from "./reinit.js";
export {
  ArmComparison,
  SeedComparison,
  compareArm,
  meanStd,
  tokenEfficiencyGain,
  tokensToReach,
} from "./report.js";
export { Rng, STREAM_DATA, STREAM_INIT, STREAM_REINIT, mix64 } from "./rng.js";
export {
  FORMAT_VERSION,
  HEADER_SIZE,
  ShardFormatError,
  ShardHeader,
  ShardReader,
  UNBOUNDED_BAND,
  isDyck,
  parseHeader,
  vocabSize,
} from "./shard.js";
export {
  ABLATION_SCHEMA,
  AblationConfig,
  AblationReport,
  SUITE_SCHEMA,
  SuiteConfig,
  SuiteReport,
  runReinitAblation,
  runTransferSuite,
} from "./suite.js";
export {
  PretrainInit,
  StageOptions,
  StageResult,
  prePreTrain,
  preTrain,
} from "./train.js";
