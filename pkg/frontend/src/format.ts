// Popup content. Values render to one decimal place or the literal
// "No data"; the UI never invents a number the server did not send.

import { DistrictProperties, LeafProperties } from "./types.js";

export function formatValue(value: number | null | undefined): string {
  if (value === null || value === undefined) return "No data";
  return value.toFixed(1);
}

export interface SchoolPopup {
  kind: "school";
  name: string;
  address: string;
  district: string;
  value: string;
}

export interface DistrictPopup {
  kind: "district";
  county: string;
  districtName: string;
  value: string;
}

export function schoolPopup(props: LeafProperties): SchoolPopup {
  return {
    kind: "school",
    name: props.name,
    address: props.address,
    district: props.district_name,
    value: formatValue(props.value),
  };
}

export function districtPopup(props: DistrictProperties): DistrictPopup {
  return {
    kind: "district",
    county: props.county_name,
    districtName: props.district_name,
    value: formatValue(props.value),
  };
}

const TITLES: Record<string, string> = {
  aerobic_capacity: "Aerobic capacity",
  body_composition: "Body composition",
  upper_body_strength: "Upper body strength",
  abdominal_strength: "Abdominal strength",
  flexibility: "Flexibility",
  trunk_lift: "Trunk lift",
};

export function assessmentTitle(token: string): string {
  return TITLES[token] ?? token;
}
