export { ApiClient, ApiError } from './api';
export { mount } from './main';
export { Dashboard } from './state';
export type { ViewDocs } from './state';
export * from './types';
export * from './panels';
export * from './layout';
export { renderGraph, edgeOpacity, edgeWidth } from './render/graph';
export { renderSentiment, traineesAtWindow, windowsOfPoint } from './render/sentiment';
export { renderClusters, renderElbow } from './render/clusters';
export { renderMatrix, cellTooltip } from './render/matrix';
