export {
  FEMB_MAGIC,
  FEMB_VERSION,
  FEMB_HEADER_BYTES,
  FembFormatError,
  encodeFemb,
  decodeFemb,
  readFemb,
  writeFemb,
  type FrameMatrix,
} from "./femb.js";
export {
  WavFormatError,
  readWav,
  resampleLinear,
  monoAtRate,
  writeWavPcm16,
  type AudioData,
} from "./wav.js";
export {
  EMBEDDER_ID,
  EMBED_DIM,
  STRIDE_SECONDS,
  TARGET_RATE,
  frameCount,
  embedUtterance,
} from "./embedder.js";
export { formatTextGrid, writeTextGrid, type Interval, type TierSpec } from "./textgrid.js";
export {
  AlignmentError,
  wordToPhones,
  uniformAlignment,
  alignUniform,
  alignWithMfa,
  mfaAvailable,
  type MfaOptions,
  type MfaRequest,
} from "./aligner.js";
export {
  JobError,
  LABELS,
  SYSTEMS,
  EMOTIONS,
  loadJob,
  type Emotion,
  type ExtractJob,
  type Label,
  type System,
  type UtteranceSpec,
} from "./job.js";
export { manifestLine, portablePath, writeManifest, type ManifestRow } from "./manifest.js";
export {
  extractEmbeddings,
  runAlignment,
  type AlignerChoice,
  type AlignReport,
  type BatchOptions,
  type ExtractReport,
  type UttIssue,
} from "./batch.js";
