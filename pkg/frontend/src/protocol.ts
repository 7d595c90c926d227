// Wire types for the shared-dof.v1 session protocol.
// Field names and shapes mirror the server's JSON exactly; the console
// renders these verbatim and never derives robot state on its own.

export const PROTOCOL = "shared-dof.v1";

export interface PoseDict {
  position: number[];      // [x, y, z] metres
  orientation: number[];   // unit quaternion [w, x, y, z]
  aperture: number;        // 0 closed .. 1 open
}

export interface TwistDict {
  linear: number[];        // m/s
  angular: number[];       // rad/s
  aperture_rate: number;   // 1/s
}

export type MappingSource =
  | { kind: "classic"; mode: number }
  | { kind: "suggestion"; epoch: number };

export interface SessionEvent {
  type: string;
  [key: string]: unknown;
}

export interface TickRecord {
  tick: number;
  sim_time_s: number;
  gripper: PoseDict;
  twist: TwistDict;
  mapping_source: MappingSource;
  suggestion_epoch: number | null;
  suggestion_confidence: number | null;
  events: SessionEvent[];
  phase: string;
}

export interface ArrowCue {
  kind: "current" | "suggested";
  anchor: number[];
  twist: TwistDict;
}

export interface DofCue {
  labels: string[];   // 7 entries
  levels: number[];   // 0..1 per DoF
}

export interface GhostCue {
  samples: PoseDict[];
}

export interface VibroFrame {
  cell: number;        // 0..8 on the 3x3 actuator grid, row 0 = north
  start_ms: number;
  duration_ms: number;
  amplitude: number;   // 0..1
}

export interface VibroCue {
  mode: string;
  octant: number;
  heading: string;
  z_level: number;
  total_ms: number;
  frames: VibroFrame[];
}

export interface CueBundle {
  arrows: ArrowCue[];
  dof: DofCue;
  ghost: GhostCue | null;
  vibro: VibroCue | null;
}

export interface SceneObject {
  id: string;
  half_extents: number[];
  position: number[];
  orientation: number[];
  graspable: boolean;
  color_tag: string;
  attached: boolean;
}

export interface SceneZone {
  id: string;
  center: number[];
  radius: number;
  color_tag: string;
}

export interface SessionDescriptor {
  protocol: string;
  scenario: string;
  variant: string;
  tick_dt: number;
  seed: number;
  limits: { min: number[]; max: number[] };
  objects: SceneObject[];
  zones: SceneZone[];
  start_pose: PoseDict;
}

export interface RunMetrics {
  variant: string;
  scenario: string;
  seed: number;
  policy: string;
  success: boolean;
  completion_time_s: number;
  ticks: number;
  user_switches: number;
  auto_switches: number;
  path_length_m: number;
  idle_time_s: number;
}

// server -> client

export interface ScenePatch {
  objects: {
    id: string;
    position: number[];
    orientation: number[];
    attached: boolean;
  }[];
}

export interface StateMsg {
  type: "state";
  record: TickRecord;
  cues: CueBundle;
  scene: ScenePatch;
}

export interface EventMsg {
  type: "event";
  event: SessionEvent;
}

export interface DoneMsg {
  type: "done";
  metrics: RunMetrics;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  detail: string;
}

export interface HelloReply {
  type: "hello";
  version: string;
}

export interface ScenariosMsg {
  type: "scenarios";
  names: string[];
}

export interface SessionCreatedMsg {
  type: "SessionCreated";
  descriptor: SessionDescriptor;
}

export interface PongMsg {
  type: "pong";
}

export type ServerMessage =
  | StateMsg
  | EventMsg
  | DoneMsg
  | ErrorMsg
  | HelloReply
  | ScenariosMsg
  | SessionCreatedMsg
  | PongMsg;

// client -> server

export interface SessionConfig {
  variant?: string;
  seed?: number;
  tick_rate?: number;
  idle_timeout_s?: number;
  threshold_angle_deg?: number;
  speed_scale?: number;
  vibro_mode?: string;
}

export interface InputMsg {
  type: "input";
  axis0: number;
  axis1: number;
  mode_switch?: boolean;
  accept?: boolean;
  request?: boolean;
  estop?: boolean;
}

export function modeLabel(source: MappingSource): string {
  if (source.kind === "classic") return `M${source.mode}`;
  return `AI #${source.epoch}`;
}
