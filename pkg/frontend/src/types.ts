// Payload shapes of the HTTP API this client consumes, plus the published
// color contract. Fill colors always arrive on the features themselves; the
// palette below exists only so the legend can show all six swatches even
// when a class is absent from the current view.

export interface Meta {
  years: number[];
  grades: number[];
  assessments: string[];
  counties: string[];
}

export interface FilterState {
  year: number;
  grade: number;
  assessment: string;
  counties: string[];
}

export const DEFAULT_FILTERS: FilterState = {
  year: 2019,
  grade: 5,
  assessment: "aerobic_capacity",
  counties: [],
};

export const GRADES = [5, 7, 9] as const;

export const ASSESSMENTS = [
  "aerobic_capacity",
  "body_composition",
  "upper_body_strength",
  "abdominal_strength",
  "flexibility",
  "trunk_lift",
] as const;

export const PALETTE = [
  "#d7641f",
  "#f2a35c",
  "#f7ecd9",
  "#8fbadd",
  "#2f6db3",
] as const;

export const NO_DATA_COLOR = "#4a4a4a";

export interface MultiPolygonGeometry {
  type: "MultiPolygon";
  coordinates: number[][][][];
}

export interface PointGeometry {
  type: "Point";
  coordinates: [number, number];
}

export interface Feature<G, P> {
  type: "Feature";
  geometry: G;
  properties: P;
}

export interface FeatureCollection<G, P> {
  type: "FeatureCollection";
  features: Feature<G, P>[];
}

export interface DistrictProperties {
  cdscode: string;
  district_name: string;
  county_name: string;
  value: number | null;
  color_class: string;
  fill: string;
}

export interface ClusterProperties {
  kind: "Cluster";
  count: number;
  expansion_zoom: number;
}

export interface LeafProperties {
  kind: "Leaf";
  count: 1;
  cdscode: string;
  name: string;
  address: string;
  district_name: string;
  value: number | null;
  color_class: string;
  fill: string;
}

export type SchoolProperties = ClusterProperties | LeafProperties;

export type DistrictCollection = FeatureCollection<
  MultiPolygonGeometry,
  DistrictProperties
>;

export type SchoolCollection = FeatureCollection<
  PointGeometry,
  SchoolProperties
>;

export interface JoinStats {
  matched: number;
  unmatched_codes: string[];
  duplicate_rows: number;
}

export interface LayerCreated {
  name: string;
  join_stats: JoinStats;
  skipped_non_numeric: number;
}

export interface LayerMeta extends LayerCreated {
  created_at: string;
}
