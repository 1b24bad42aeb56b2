// Circle sizing. Clusters grow with the logarithm of their member count so
// a 500-school cluster stays clickable next to a 2-school one; single
// schools use one fixed radius.

export const LEAF_RADIUS = 6;
export const CLUSTER_BASE_RADIUS = 12;
export const CLUSTER_RADIUS_STEP = 8;

export function clusterRadius(count: number): number {
  if (count <= 1) return LEAF_RADIUS;
  return CLUSTER_BASE_RADIUS + CLUSTER_RADIUS_STEP * Math.log10(count);
}

export function clusterLabel(count: number): string {
  return String(count);
}
